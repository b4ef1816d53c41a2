#include "oeo/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oeo {

namespace {

constexpr double kFitnessEps = 1e-12;
constexpr double kVolumeFloor = 1e-3;
constexpr double kProbFloor = 1e-12;

double fitness_one(double cost, double best, double worst) {
    return (worst - cost) / (worst - best + kFitnessEps);
}

void check_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
}

double volume_from_bbox(const Vec& lo, const Vec& hi, const Bounds& bounds) {
    double vol = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        double extent = (hi[i] - lo[i]) / bounds.width(i);
        vol *= std::max(extent, kVolumeFloor);
    }
    return vol;
}

double sq_distance(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

double score_from_stats(const ClusterStats& st, const EffectivenessMetric& metric,
                        const Bounds& bounds, double cb, double cw,
                        double nearest_best_cost, bool has_nearest) {
    const double n = static_cast<double>(st.count);
    switch (metric.tag) {
        case MetricTag::sum_fitness_per_volume: {
            double sum = (n * cw - st.cost_sum) / (cw - cb + kFitnessEps);
            return sum / volume_from_bbox(st.bbox_lo, st.bbox_hi, bounds);
        }
        case MetricTag::sum_elite_fitness_per_volume: {
            double sum = 0.0;
            for (double c : st.elite_costs) sum += fitness_one(c, cb, cw);
            return sum / volume_from_bbox(st.bbox_lo, st.bbox_hi, bounds);
        }
        case MetricTag::best_fitness_per_volume:
            return fitness_one(st.best_cost, cb, cw) /
                   volume_from_bbox(st.bbox_lo, st.bbox_hi, bounds);
        case MetricTag::var_fitness_per_volume: {
            double mean = st.cost_sum / n;
            double var_cost = std::max(0.0, st.cost_sq_sum / n - mean * mean);
            double denom = cw - cb + kFitnessEps;
            return var_cost / (denom * denom) /
                   volume_from_bbox(st.bbox_lo, st.bbox_hi, bounds);
        }
        case MetricTag::mean_elite_fitness: {
            double sum = 0.0;
            for (double c : st.elite_costs) sum += fitness_one(c, cb, cw);
            return sum / static_cast<double>(st.elite_costs.size());
        }
        case MetricTag::subtract_from_nearest_fitness: {
            if (!has_nearest) return 0.0;  // single cluster: nothing to compare against
            return fitness_one(st.best_cost, cb, cw) - fitness_one(nearest_best_cost, cb, cw);
        }
    }
    throw std::logic_error("unreachable metric tag");
}

void global_cost_range(std::span<const Cluster> clusters, double& cb, double& cw) {
    cb = std::numeric_limits<double>::infinity();
    cw = -cb;
    for (const auto& c : clusters) {
        for (const auto& m : c.members) {
            cb = std::min(cb, m.cost);
            cw = std::max(cw, m.cost);
        }
    }
}

std::vector<std::size_t> nearest_centers(std::span<const Vec> centers) {
    std::vector<std::size_t> nearest(centers.size(), 0);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < centers.size(); ++j) {
            if (j == i) continue;
            double d = sq_distance(centers[i], centers[j]);
            if (d < best) {
                best = d;
                nearest[i] = j;
            }
        }
    }
    return nearest;
}

std::vector<std::size_t> sorted_by_cost(const Cluster& cluster) {
    std::vector<std::size_t> order(cluster.members.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cluster.members[a].cost < cluster.members[b].cost;
    });
    return order;
}

std::pair<std::size_t, std::size_t> two_distinct(std::size_t n, Rng& rng) {
    std::size_t i = rng.index(n);
    std::size_t j = rng.index(n - 1);
    if (j >= i) ++j;
    return {i, j};
}

}  // namespace

std::vector<double> fitness_of(const std::vector<double>& costs) {
    if (costs.empty()) throw std::invalid_argument("fitness_of: empty cost list");
    check_finite(costs, "fitness_of");
    auto [mn, mx] = std::minmax_element(costs.begin(), costs.end());
    std::vector<double> fit(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) fit[i] = fitness_one(costs[i], *mn, *mx);
    return fit;
}

ClusterStats ClusterStats::from(const Cluster& cluster, int elite_count) {
    if (cluster.members.empty()) throw std::invalid_argument("cluster stats: empty cluster");
    ClusterStats st;
    for (const auto& m : cluster.members) st.add(m.point, m.cost, elite_count);
    return st;
}

void ClusterStats::add(const Vec& point, double cost, int elite_count) {
    if (count == 0 && bbox_lo.empty()) {
        bbox_lo = Vec(point.size(), std::numeric_limits<double>::infinity());
        bbox_hi = Vec(point.size(), -std::numeric_limits<double>::infinity());
        best_cost = std::numeric_limits<double>::infinity();
        worst_cost = -std::numeric_limits<double>::infinity();
    }
    ++count;
    cost_sum += cost;
    cost_sq_sum += cost * cost;
    best_cost = std::min(best_cost, cost);
    worst_cost = std::max(worst_cost, cost);
    auto pos = std::upper_bound(elite_costs.begin(), elite_costs.end(), cost);
    elite_costs.insert(pos, cost);
    if (elite_costs.size() > static_cast<std::size_t>(elite_count)) elite_costs.pop_back();
    for (std::size_t i = 0; i < point.size(); ++i) {
        bbox_lo[i] = std::min(bbox_lo[i], point[i]);
        bbox_hi[i] = std::max(bbox_hi[i], point[i]);
    }
}

double cluster_volume(const Cluster& cluster, const Bounds& bounds) {
    if (cluster.members.empty()) throw std::invalid_argument("cluster_volume: empty cluster");
    auto st = ClusterStats::from(cluster, 1);
    return volume_from_bbox(st.bbox_lo, st.bbox_hi, bounds);
}

double effectiveness(const Cluster& cluster, std::span<const Cluster> all_clusters,
                     const EffectivenessMetric& metric, const Bounds& bounds) {
    if (cluster.members.empty()) throw std::invalid_argument("effectiveness: empty cluster");
    double cb, cw;
    global_cost_range(all_clusters, cb, cw);
    auto st = ClusterStats::from(cluster, metric.elite_count);

    double nearest_best = 0.0;
    bool has_nearest = false;
    if (metric.tag == MetricTag::subtract_from_nearest_fitness && all_clusters.size() > 1) {
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& other : all_clusters) {
            if (&other == &cluster) continue;
            double d = sq_distance(cluster.center, other.center);
            if (d < best_d) {
                best_d = d;
                nearest_best = other.best_cost();
                has_nearest = true;
            }
        }
    }
    return score_from_stats(st, metric, bounds, cb, cw, nearest_best, has_nearest);
}

std::vector<double> effectiveness_scores(std::span<const Cluster> clusters,
                                         const EffectivenessMetric& metric, const Bounds& bounds,
                                         std::span<const std::size_t> nearest) {
    if (clusters.empty()) throw std::invalid_argument("effectiveness_scores: no clusters");
    std::vector<ClusterStats> stats;
    std::vector<Vec> centers;
    stats.reserve(clusters.size());
    centers.reserve(clusters.size());
    for (const auto& c : clusters) {
        stats.push_back(ClusterStats::from(c, metric.elite_count));
        centers.push_back(c.center);
    }
    std::vector<std::size_t> computed;
    if (nearest.empty() && metric.tag == MetricTag::subtract_from_nearest_fitness &&
        clusters.size() > 1) {
        computed = nearest_centers(centers);
        nearest = computed;
    }
    double cb, cw;
    global_cost_range(clusters, cb, cw);
    return effectiveness_scores_from_stats(stats, nearest, metric, bounds, cb, cw);
}

std::vector<double> effectiveness_scores_from_stats(
    std::span<const ClusterStats> stats, std::span<const std::size_t> nearest,
    const EffectivenessMetric& metric, const Bounds& bounds, double global_best_cost,
    double global_worst_cost) {
    std::vector<double> scores(stats.size());
    const bool use_nearest =
        metric.tag == MetricTag::subtract_from_nearest_fitness && stats.size() > 1;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        double nb = 0.0;
        if (use_nearest) nb = stats[nearest[i]].best_cost;
        scores[i] = score_from_stats(stats[i], metric, bounds, global_best_cost,
                                     global_worst_cost, nb, use_nearest);
    }
    // the whole score list is rebased so its minimum sits at zero before it
    // becomes a selection distribution; the floor in selection_probabilities
    // keeps the rebased minimum selectable
    double mn = *std::min_element(scores.begin(), scores.end());
    for (double& s : scores) s -= mn;
    return scores;
}

std::vector<double> selection_probabilities(std::vector<double> scores) {
    if (scores.empty()) throw std::invalid_argument("selection_probabilities: empty scores");
    double total = 0.0;
    for (double& s : scores) {
        if (!std::isfinite(s) || s < 0.0)
            throw std::invalid_argument("selection_probabilities: scores must be finite and >= 0");
        s = std::max(s, kProbFloor);
        total += s;
    }
    for (double& s : scores) s /= total;
    return scores;
}

std::vector<double> flatten_distribution(const std::vector<double>& p, double b, double lambda) {
    if (!std::isfinite(b) || b < 0.0) throw std::invalid_argument("flatten: B must be >= 0");
    if (p.empty()) throw std::invalid_argument("flatten: empty distribution");
    double sum = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x <= 0.0 || x > 1.0)
            throw std::invalid_argument("flatten: probabilities must lie in (0,1]");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("flatten: input must sum to 1");
    if (b == 0.0) return p;  // log(e) = 1: identity by construction

    const double root = std::log(std::exp(1.0) + lambda * b);
    std::vector<double> f(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        f[i] = std::exp(std::log(p[i]) / root);
        total += f[i];
    }
    for (double& x : f) x /= total;
    return f;
}

std::size_t roulette_select(const std::vector<double>& weights, Rng& rng) {
    if (weights.empty()) throw std::invalid_argument("roulette: empty weights");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("roulette: weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("roulette: all-zero weights");
    double target = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    return weights.size() - 1;
}

Vec propose_update(const Cluster& cluster, const UpdateMethod& method, Rng& rng,
                   const Bounds& bounds) {
    const auto& mem = cluster.members;
    const std::size_t n = mem.size();
    if (n == 0) throw std::invalid_argument("propose_update: empty cluster");
    for (const auto& m : mem) {
        if (!std::isfinite(m.cost)) throw std::invalid_argument("propose_update: non-finite cost");
        check_finite(m.point, "propose_update");
    }
    const std::size_t dims = mem.front().point.size();

    auto mean_of = [&](const std::vector<std::size_t>& idx) {
        Vec out(dims, 0.0);
        for (std::size_t k : idx) {
            for (std::size_t i = 0; i < dims; ++i) out[i] += mem[k].point[i];
        }
        for (double& x : out) x /= static_cast<double>(idx.size());
        return out;
    };
    auto move_through_best = [&]() {
        const Vec& best = cluster.best_member().point;
        const Vec& start = mem[rng.index(n)].point;
        double u = rng.uniform();
        Vec out(dims);
        for (std::size_t i = 0; i < dims; ++i) out[i] = start[i] + u * (best[i] - start[i]);
        return out;
    };

    Vec out;
    switch (method.tag) {
        case UpdateTag::either_randomly_or_through_best: {
            if (rng.uniform() < method.p) return random_in_cluster(cluster, bounds, rng);
            out = move_through_best();
            break;
        }
        case UpdateTag::move_through_best:
            out = move_through_best();
            break;
        case UpdateTag::select2_choose_between: {
            if (n < 2) throw std::invalid_argument("propose_update: need two members");
            auto [i, j] = two_distinct(n, rng);
            double a = rng.uniform();
            out.resize(dims);
            for (std::size_t d = 0; d < dims; ++d)
                out[d] = mem[j].point[d] + a * (mem[i].point[d] - mem[j].point[d]);
            break;
        }
        case UpdateTag::cluster_mean: {
            std::vector<std::size_t> all(n);
            std::iota(all.begin(), all.end(), std::size_t{0});
            out = mean_of(all);
            break;
        }
        case UpdateTag::mean_of_elites: {
            auto order = sorted_by_cost(cluster);
            order.resize(std::min<std::size_t>(order.size(), method.elite_count));
            out = mean_of(order);
            break;
        }
        case UpdateTag::weighted_mean_of_sols: {
            if (n < 2) throw std::invalid_argument("propose_update: need two members");
            auto [i, j] = two_distinct(n, rng);
            auto f = fitness_of({mem[i].cost, mem[j].cost});
            double total = f[0] + f[1];
            out.resize(dims);
            if (total < kFitnessEps) {
                for (std::size_t d = 0; d < dims; ++d)
                    out[d] = 0.5 * (mem[i].point[d] + mem[j].point[d]);
            } else {
                for (std::size_t d = 0; d < dims; ++d)
                    out[d] = (f[0] * mem[i].point[d] + f[1] * mem[j].point[d]) / total;
            }
            break;
        }
        case UpdateTag::weighted_mean_of_elites: {
            auto order = sorted_by_cost(cluster);
            order.resize(std::min<std::size_t>(order.size(), method.elite_count));
            std::vector<double> costs;
            costs.reserve(order.size());
            for (std::size_t k : order) costs.push_back(mem[k].cost);
            auto f = fitness_of(costs);
            double total = std::accumulate(f.begin(), f.end(), 0.0);
            if (total < kFitnessEps) {
                out = mean_of(order);
            } else {
                out.assign(dims, 0.0);
                for (std::size_t k = 0; k < order.size(); ++k) {
                    for (std::size_t d = 0; d < dims; ++d)
                        out[d] += f[k] * mem[order[k]].point[d];
                }
                for (double& x : out) x /= total;
            }
            break;
        }
    }
    return clamp_to_bounds(std::move(out), bounds);
}

Vec random_in_cluster(const Cluster& cluster, const Bounds& bounds, Rng& rng) {
    const auto& mem = cluster.members;
    if (mem.empty()) throw std::invalid_argument("random_in_cluster: empty cluster");
    const std::size_t dims = bounds.dims();
    Vec out(dims);
    if (mem.size() >= 2) {
        auto st = ClusterStats::from(cluster, 1);
        Vec centroid(dims, 0.0);
        for (const auto& m : mem) {
            for (std::size_t i = 0; i < dims; ++i) centroid[i] += m.point[i];
        }
        for (double& c : centroid) c /= static_cast<double>(mem.size());
        for (std::size_t i = 0; i < dims; ++i) {
            // inflate the member box by 10% about the member centroid, with a
            // width floor so a collapsed member set stays sampleable
            const double floor_half = 0.005 * bounds.width(i);
            double lo = centroid[i] - std::max(1.1 * (centroid[i] - st.bbox_lo[i]), floor_half);
            double hi = centroid[i] + std::max(1.1 * (st.bbox_hi[i] - centroid[i]), floor_half);
            out[i] = lo + rng.uniform() * (hi - lo);
        }
    } else {
        for (std::size_t i = 0; i < dims; ++i) {
            out[i] = cluster.center[i] + rng.normal() * 0.05 * bounds.width(i);
        }
    }
    return clamp_to_bounds(std::move(out), bounds);
}

}  // namespace oeo
