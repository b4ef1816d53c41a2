#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oeo/core.hpp"

namespace oeo {

/// Nonnegative fitness map for minimization: the best (lowest) cost maps to
/// ~1 and the worst to 0. fitness_i = (c_worst - c_i) / (c_worst - c_best + eps).
std::vector<double> fitness_of(const std::vector<double>& costs);

/// Incrementally maintainable per-cluster summary. Everything the
/// effectiveness metrics need can be computed from these fields plus the
/// global cost extremes, which keeps the engine's selection step linear in
/// the number of clusters.
struct ClusterStats {
    std::size_t count = 0;
    double cost_sum = 0.0;
    double cost_sq_sum = 0.0;
    double best_cost = 0.0;
    double worst_cost = 0.0;
    std::vector<double> elite_costs;  // ascending, at most elite_count entries
    Vec bbox_lo, bbox_hi;             // member bounding box

    static ClusterStats from(const Cluster& cluster, int elite_count);
    void add(const Vec& point, double cost, int elite_count);
};

/// Member bounding-box volume in coordinates normalized to the unit box,
/// with a 1e-3 floor per dimension so singleton clusters stay positive.
double cluster_volume(const Cluster& cluster, const Bounds& bounds);

/// Raw effectiveness score of one cluster. SubtractFromNearestFitness can be
/// negative here; the score-list shift to a minimum of zero happens in
/// effectiveness_scores.
double effectiveness(const Cluster& cluster, std::span<const Cluster> all_clusters,
                     const EffectivenessMetric& metric, const Bounds& bounds);

/// Scores for every cluster, shifted so the minimum is zero whenever any
/// raw score is negative. `nearest` (optional) supplies each cluster's
/// nearest-center index and skips the quadratic search.
std::vector<double> effectiveness_scores(std::span<const Cluster> clusters,
                                         const EffectivenessMetric& metric, const Bounds& bounds,
                                         std::span<const std::size_t> nearest = {});

/// Engine fast path over cached stats; identical scores to
/// effectiveness_scores on the same state.
std::vector<double> effectiveness_scores_from_stats(std::span<const ClusterStats> stats,
                                                    std::span<const std::size_t> nearest,
                                                    const EffectivenessMetric& metric,
                                                    const Bounds& bounds, double global_best_cost,
                                                    double global_worst_cost);

/// Nonnegative scores -> probability vector: floor zeros at 1e-12, divide by
/// the sum. Input must contain at least one positive entry.
std::vector<double> selection_probabilities(std::vector<double> scores);

/// The cluster-selection flattening nonlinearity
///   f_i = exp(log(p_i) / log(e + lambda * B)),
/// renormalized to sum 1. B = 0 is the identity; large B tends to uniform.
std::vector<double> flatten_distribution(const std::vector<double>& p, double b, double lambda);

/// Fitness-proportionate index selection. One uniform draw.
std::size_t roulette_select(const std::vector<double>& weights, Rng& rng);

/// Rule-based solution proposal over a cluster's members (the published
/// update-method table). The result is clamped to the domain box.
Vec propose_update(const Cluster& cluster, const UpdateMethod& method, Rng& rng,
                   const Bounds& bounds);

/// Random placement inside a cluster's region: the member bounding box
/// inflated by 10% about its midpoint when there are >= 2 members, otherwise
/// a Gaussian around the center with sigma = 5% of each domain width.
Vec random_in_cluster(const Cluster& cluster, const Bounds& bounds, Rng& rng);

}  // namespace oeo
