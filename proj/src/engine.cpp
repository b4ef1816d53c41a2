#include "oeo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oeo {

namespace {

double sq_distance(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double adapt_a(double a, const IterationOutcome& outcome, const OeoConfig& config, Rng& rng) {
    if (outcome.branch == IterationOutcome::Branch::new_cluster) return a;
    if (outcome.improved_cluster_best) {
        a += config.delta_a;
    } else {
        a -= config.delta_a * rng.uniform();
    }
    return std::clamp(a, config.a_min, config.a_max);
}

double adapt_b(double b, const IterationOutcome& outcome, const OeoConfig& config) {
    if (outcome.branch == IterationOutcome::Branch::new_cluster) return b;
    if (outcome.improved_cluster_best) {
        b += config.m1 * config.step_scale;
    } else {
        b -= config.m2 * config.step_scale;
    }
    return std::clamp(b, config.b_min, config.b_max);
}

double adapt_g(double g, const IterationOutcome& outcome, const OeoConfig& config) {
    if (outcome.branch == IterationOutcome::Branch::new_cluster) return g;
    const bool rule = outcome.branch == IterationOutcome::Branch::rule_based;
    const bool shrink =
        (rule && !outcome.improved_cluster_best) || (!rule && outcome.improved_cluster_best);
    g += shrink ? -config.delta_g : config.delta_g;
    return std::clamp(g, config.g_min, config.g_max);
}

OeoEngine::OeoEngine(OeoConfig config, const Objective& objective, Rng& rng)
    : config_(std::move(config)), objective_(objective), rng_(rng) {
    config_.validate();
    if (objective_.dims != objective_.bounds.dims())
        throw std::invalid_argument("engine: objective dims/bounds mismatch");

    state_.a = config_.a_start;
    state_.b = config_.b_start;
    state_.g = config_.g_start;
    state_.best.cost = std::numeric_limits<double>::infinity();
    global_best_cost_ = std::numeric_limits<double>::infinity();
    global_worst_cost_ = -std::numeric_limits<double>::infinity();

    clusters_.reserve(config_.n_clusters_init);
    for (int i = 0; i < config_.n_clusters_init; ++i) {
        Vec point = random_point(objective_.bounds, rng_);
        double cost = evaluate(point);
        add_cluster(std::move(point), cost);
    }
}

double OeoEngine::evaluate(const Vec& point) {
    double cost = objective_.eval(point);
    if (!std::isfinite(cost)) throw std::runtime_error("objective returned non-finite cost");
    ++state_.evaluations;
    if (cost < state_.best.cost) {
        state_.best = Solution{point, cost, state_.iteration};
    }
    global_best_cost_ = std::min(global_best_cost_, cost);
    global_worst_cost_ = std::max(global_worst_cost_, cost);
    return cost;
}

void OeoEngine::add_cluster(Vec center_point, double cost) {
    Cluster cluster;
    cluster.center = center_point;
    cluster.local_g = config_.g_start;
    cluster.members.push_back(Solution{std::move(center_point), cost, state_.iteration});
    clusters_.push_back(std::move(cluster));
    stats_.push_back(ClusterStats::from(clusters_.back(), config_.effectiveness_metric.elite_count));

    // maintain the nearest-center cache: fresh entry scans everyone once and
    // may become somebody else's new nearest
    const std::size_t added = clusters_.size() - 1;
    nearest_.push_back(0);
    if (added == 0) return;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < added; ++j) {
        double d = sq_distance(clusters_[added].center, clusters_[j].center);
        if (d < best) {
            best = d;
            nearest_[added] = j;
        }
        if (d < sq_distance(clusters_[j].center, clusters_[nearest_[j]].center) ||
            nearest_[j] == j) {
            nearest_[j] = added;
        }
    }
}

void OeoEngine::append_member(std::size_t idx, Vec point, double cost) {
    stats_[idx].add(point, cost, config_.effectiveness_metric.elite_count);
    clusters_[idx].members.push_back(Solution{std::move(point), cost, state_.iteration});
}

IterationOutcome OeoEngine::step() {
    ++state_.iteration;
    IterationOutcome outcome;

    const double gate = rng_.uniform();
    if (gate > state_.a) {
        Vec point = random_point(objective_.bounds, rng_);
        double before_best = state_.best.cost;
        double cost = evaluate(point);
        add_cluster(std::move(point), cost);
        outcome.branch = IterationOutcome::Branch::new_cluster;
        outcome.cluster_index = clusters_.size() - 1;
        outcome.improved_global_best = cost < before_best;
        return outcome;  // no adaptation on the global branch
    }

    auto scores = effectiveness_scores_from_stats(stats_, nearest_, config_.effectiveness_metric,
                                                  objective_.bounds, global_best_cost_,
                                                  global_worst_cost_);
    auto probs = selection_probabilities(std::move(scores));
    probs = flatten_distribution(probs, state_.b, config_.lambda);
    const std::size_t idx = roulette_select(probs, rng_);
    Cluster& cluster = clusters_[idx];
    outcome.cluster_index = idx;

    bool rule_based = false;
    if (cluster.members.size() >= static_cast<std::size_t>(config_.min_members_for_rule)) {
        const double g_here = config_.mode == Mode::moeo ? cluster.local_g : state_.g;
        const double draw = rng_.uniform();
        // prose reading: with probability G run the rule-based update;
        // the pseudocode reading (flag) selects the random branch instead
        rule_based = config_.algorithm1_g_branch ? draw >= g_here : draw < g_here;
    }

    Vec point = rule_based ? propose_update(cluster, config_.update_method, rng_, objective_.bounds)
                           : random_in_cluster(cluster, objective_.bounds, rng_);
    outcome.branch = rule_based ? IterationOutcome::Branch::rule_based
                                : IterationOutcome::Branch::random_in_cluster;

    const double cluster_best_before = stats_[idx].best_cost;
    const double global_best_before = state_.best.cost;
    double cost = evaluate(point);
    append_member(idx, std::move(point), cost);
    outcome.improved_cluster_best = cost < cluster_best_before;
    outcome.improved_global_best = cost < global_best_before;

    // Adapt G, then A, then B (the published loop order)
    if (config_.mode == Mode::moeo) {
        cluster.local_g = adapt_g(cluster.local_g, outcome, config_);
    } else {
        state_.g = adapt_g(state_.g, outcome, config_);
    }
    state_.a = adapt_a(state_.a, outcome, config_, rng_);
    state_.b = adapt_b(state_.b, outcome, config_);
    return outcome;
}

void OeoEngine::prune() {
    const auto cap = static_cast<std::size_t>(config_.per_cluster_cap);
    bool removed_any_cluster = false;
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        auto& members = clusters_[i].members;
        if (members.size() <= cap) continue;
        std::nth_element(members.begin(), members.begin() + cap - 1, members.end(),
                         [](const Solution& a, const Solution& b) { return a.cost < b.cost; });
        members.resize(cap);
        stats_[i] = ClusterStats::from(clusters_[i], config_.effectiveness_metric.elite_count);
    }

    // global retained-solution budget: drop the worst members anywhere until
    // the total fits, keeping the global best untouched
    const std::size_t total_cap = config_.max_total_solutions > 0
                                      ? static_cast<std::size_t>(config_.max_total_solutions)
                                      : static_cast<std::size_t>(config_.n_clusters_init) *
                                            static_cast<std::size_t>(config_.per_cluster_cap);
    std::size_t total = 0;
    for (const auto& c : clusters_) total += c.members.size();
    if (total > total_cap) {
        struct Ref {
            double cost;
            std::size_t cluster, member;
        };
        std::vector<Ref> refs;
        refs.reserve(total);
        for (std::size_t i = 0; i < clusters_.size(); ++i) {
            for (std::size_t m = 0; m < clusters_[i].members.size(); ++m) {
                refs.push_back({clusters_[i].members[m].cost, i, m});
            }
        }
        std::sort(refs.begin(), refs.end(),
                  [](const Ref& a, const Ref& b) { return a.cost > b.cost; });
        std::vector<std::vector<std::size_t>> drop(clusters_.size());
        std::size_t to_remove = total - total_cap;
        for (const auto& ref : refs) {
            if (to_remove == 0) break;
            if (ref.cost <= state_.best.cost) break;  // never the global best
            drop[ref.cluster].push_back(ref.member);
            --to_remove;
        }
        for (std::size_t i = 0; i < clusters_.size(); ++i) {
            if (drop[i].empty()) continue;
            auto& members = clusters_[i].members;
            std::sort(drop[i].begin(), drop[i].end(), std::greater<>());
            for (std::size_t m : drop[i]) members.erase(members.begin() + m);
            if (!members.empty())
                stats_[i] = ClusterStats::from(clusters_[i],
                                               config_.effectiveness_metric.elite_count);
        }
    }

    for (std::size_t i = clusters_.size(); i-- > 0 && clusters_.size() > 1;) {
        if (clusters_[i].members.empty()) {
            clusters_.erase(clusters_.begin() + i);
            stats_.erase(stats_.begin() + i);
            removed_any_cluster = true;
        }
    }
    if (removed_any_cluster) {
        nearest_.assign(clusters_.size(), 0);
        for (std::size_t i = 0; i < clusters_.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < clusters_.size(); ++j) {
                if (j == i) continue;
                double d = sq_distance(clusters_[i].center, clusters_[j].center);
                if (d < best) {
                    best = d;
                    nearest_[i] = j;
                }
            }
        }
    }
    refresh_cost_range();
}

void OeoEngine::refresh_cost_range() {
    global_best_cost_ = std::numeric_limits<double>::infinity();
    global_worst_cost_ = -std::numeric_limits<double>::infinity();
    for (const auto& st : stats_) {
        global_best_cost_ = std::min(global_best_cost_, st.best_cost);
        global_worst_cost_ = std::max(global_worst_cost_, st.worst_cost);
    }
}

double OeoEngine::mean_g() const {
    if (config_.mode == Mode::oeo) return state_.g;
    double sum = 0.0;
    for (const auto& c : clusters_) sum += c.local_g;
    return sum / static_cast<double>(clusters_.size());
}

TraceRow OeoEngine::trace_row() const {
    TraceRow row;
    row.iteration = state_.iteration;
    row.evaluations = state_.evaluations;
    row.best_cost = state_.best.cost;
    row.a = state_.a;
    row.b = state_.b;
    row.g_mean = mean_g();
    row.cluster_count = static_cast<long>(clusters_.size());
    return row;
}

RunResult run_oeo(const OeoConfig& config, const Objective& objective, Rng& rng,
                  std::uint64_t seed_label) {
    OeoEngine engine(config, objective, rng);
    RunResult result;
    result.seed = seed_label;
    result.config = config_snapshot(config);
    result.trace.push_back(engine.trace_row());
    while (!engine.budget_exhausted()) {
        engine.step();
        if (engine.state().iteration % config.prune_period == 0) engine.prune();
        result.trace.push_back(engine.trace_row());
    }
    result.best = engine.state().best;
    return result;
}

RunResult run_oeo(const OeoConfig& config, const Objective& objective, std::uint64_t seed) {
    Rng rng(seed);
    return run_oeo(config, objective, rng, seed);
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const OeoConfig& config) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("mode", config.mode == Mode::oeo ? "oeo" : "moeo");
    kv.emplace_back("n_clusters_init", std::to_string(config.n_clusters_init));
    kv.emplace_back("a_start", fmt(config.a_start));
    kv.emplace_back("b_start", fmt(config.b_start));
    kv.emplace_back("g_start", fmt(config.g_start));
    kv.emplace_back("m1", fmt(config.m1));
    kv.emplace_back("m2", fmt(config.m2));
    kv.emplace_back("step_scale", fmt(config.step_scale));
    kv.emplace_back("delta_a", fmt(config.delta_a));
    kv.emplace_back("delta_g", fmt(config.delta_g));
    kv.emplace_back("min_members_for_rule", std::to_string(config.min_members_for_rule));
    kv.emplace_back("prune_period", std::to_string(config.prune_period));
    kv.emplace_back("per_cluster_cap", std::to_string(config.per_cluster_cap));
    kv.emplace_back("update_method", to_string(config.update_method.tag));
    kv.emplace_back("update_p", fmt(config.update_method.p));
    kv.emplace_back("elite_count", std::to_string(config.update_method.elite_count));
    kv.emplace_back("effectiveness_metric", to_string(config.effectiveness_metric.tag));
    kv.emplace_back("lambda", fmt(config.lambda));
    kv.emplace_back("max_evaluations", std::to_string(config.max_evaluations));
    kv.emplace_back("algorithm1_g_branch", config.algorithm1_g_branch ? "true" : "false");
    return kv;
}

}  // namespace oeo
