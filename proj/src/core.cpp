#include "oeo/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oeo {

Bounds::Bounds(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.empty() || lower.size() != upper.size())
        throw std::invalid_argument("bounds: need matching non-empty lower/upper");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] >= upper[i])
            throw std::invalid_argument("bounds: lower[i] < upper[i] required");
    }
}

bool Bounds::contains(const Vec& point) const {
    if (point.size() != lower.size()) return false;
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (!(point[i] >= lower[i] && point[i] <= upper[i])) return false;
    }
    return true;
}

double Cluster::best_cost() const { return best_member().cost; }

const Solution& Cluster::best_member() const {
    if (members.empty()) throw std::logic_error("cluster has no members");
    const Solution* best = &members.front();
    for (const auto& m : members) {
        if (m.cost < best->cost) best = &m;
    }
    return *best;
}

namespace {

const char* kMetricNames[] = {
    "sum_fitness_per_volume",   "sum_elite_fitness_per_volume",
    "best_fitness_per_volume",  "var_fitness_per_volume",
    "mean_elite_fitness",       "subtract_from_nearest_fitness",
};

const char* kUpdateNames[] = {
    "either_randomly_or_through_best",
    "move_through_best",
    "select2_choose_between",
    "cluster_mean",
    "mean_of_elites",
    "weighted_mean_of_sols",
    "weighted_mean_of_elites",
};

}  // namespace

std::string to_string(MetricTag tag) { return kMetricNames[static_cast<int>(tag)]; }
std::string to_string(UpdateTag tag) { return kUpdateNames[static_cast<int>(tag)]; }

MetricTag metric_tag_from_string(const std::string& name) {
    for (int i = 0; i < 6; ++i) {
        if (name == kMetricNames[i]) return static_cast<MetricTag>(i);
    }
    throw std::invalid_argument("unknown effectiveness metric: " + name);
}

UpdateTag update_tag_from_string(const std::string& name) {
    for (int i = 0; i < 7; ++i) {
        if (name == kUpdateNames[i]) return static_cast<UpdateTag>(i);
    }
    throw std::invalid_argument("unknown update method: " + name);
}

OeoConfig OeoConfig::simple() {
    OeoConfig cfg;
    cfg.mode = Mode::oeo;
    cfg.m1 = 5.4;
    cfg.m2 = 3.9;
    cfg.update_method = UpdateMethod{UpdateTag::mean_of_elites};
    cfg.effectiveness_metric = EffectivenessMetric{MetricTag::mean_elite_fitness};
    return cfg;
}

OeoConfig OeoConfig::modified() {
    OeoConfig cfg;
    cfg.mode = Mode::moeo;
    cfg.m1 = 7.4;
    cfg.m2 = 5.6;
    cfg.update_method = UpdateMethod{UpdateTag::weighted_mean_of_sols};
    cfg.effectiveness_metric = EffectivenessMetric{MetricTag::subtract_from_nearest_fitness};
    return cfg;
}

void OeoConfig::validate() const {
    if (n_clusters_init < 1) throw std::invalid_argument("config: n_clusters_init >= 1");
    // a_start == 0 is allowed as the documented degeneracy switch: the engine
    // then never takes a within-cluster branch, so A is never adapted and the
    // run is pure random search.
    if (a_start < 0.0 || a_start >= 1.0) throw std::invalid_argument("config: a_start in [0,1)");
    if (b_start <= 0.0 || b_start >= 1.0) throw std::invalid_argument("config: b_start in (0,1)");
    if (g_start <= 0.0 || g_start >= 1.0) throw std::invalid_argument("config: g_start in (0,1)");
    if (m1 <= m2) throw std::invalid_argument("config: m1 > m2 required");
    if (step_scale <= 0.0) throw std::invalid_argument("config: step_scale > 0");
    if (delta_a <= 0.0 || delta_g <= 0.0) throw std::invalid_argument("config: deltas > 0");
    if (min_members_for_rule < 1) throw std::invalid_argument("config: min_members_for_rule >= 1");
    if (prune_period < 1) throw std::invalid_argument("config: prune_period >= 1");
    if (per_cluster_cap < 1) throw std::invalid_argument("config: per_cluster_cap >= 1");
    if (max_total_solutions != 0 && max_total_solutions < n_clusters_init)
        throw std::invalid_argument("config: max_total_solutions >= n_clusters_init");
    if (lambda < 0.0) throw std::invalid_argument("config: lambda >= 0");
    if (max_evaluations < n_clusters_init)
        throw std::invalid_argument("config: max_evaluations >= n_clusters_init");
    if (update_method.elite_count < 1 || effectiveness_metric.elite_count < 1)
        throw std::invalid_argument("config: elite_count >= 1");
    if (update_method.p < 0.0 || update_method.p > 1.0)
        throw std::invalid_argument("config: update p in [0,1]");
}

Vec random_point(const Bounds& bounds, Rng& rng) {
    Vec point(bounds.dims());
    for (std::size_t i = 0; i < point.size(); ++i) {
        point[i] = bounds.lower[i] + rng.uniform() * bounds.width(i);
    }
    return point;
}

Vec clamp_to_bounds(Vec point, const Bounds& bounds) {
    if (point.size() != bounds.dims())
        throw std::invalid_argument("clamp: dimension mismatch");
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (!std::isfinite(point[i])) throw std::invalid_argument("clamp: non-finite coordinate");
        point[i] = std::clamp(point[i], bounds.lower[i], bounds.upper[i]);
    }
    return point;
}

}  // namespace oeo
