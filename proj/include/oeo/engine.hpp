#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oeo/core.hpp"
#include "oeo/policies.hpp"

namespace oeo {

struct IterationOutcome {
    enum class Branch { new_cluster, random_in_cluster, rule_based };
    Branch branch = Branch::new_cluster;
    std::optional<std::size_t> cluster_index;
    bool improved_cluster_best = false;  // strictly better than the touched cluster's previous best
    bool improved_global_best = false;
};

struct TraceRow {
    long iteration = 0;
    long evaluations = 0;
    double best_cost = 0.0;
    std::optional<double> a, b, g_mean;   // empty for non-adaptive algorithms
    std::optional<long> cluster_count;
};

struct RunResult {
    Solution best;
    std::vector<TraceRow> trace;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;  // snapshot, key=value
};

/// A adaptation: raise by delta_a on a within-cluster success, lower by a
/// uniformly random fraction of delta_a on failure. New-cluster iterations
/// leave A untouched. Consumes one uniform draw on the failure path only.
double adapt_a(double a, const IterationOutcome& outcome, const OeoConfig& config, Rng& rng);

/// B adaptation: +m1*step_scale on success, -m2*step_scale on failure,
/// clamped to [b_min, b_max].
double adapt_b(double b, const IterationOutcome& outcome, const OeoConfig& config);

/// G adaptation: shrink when the rule-based route failed or the random route
/// succeeded, grow otherwise; clamped to [g_min, g_max].
double adapt_g(double g, const IterationOutcome& outcome, const OeoConfig& config);

/// One optimization run: cluster lifecycle, adaptive A/B/G and periodic
/// pruning around a caller-supplied random stream.
///
/// Random draws per step, in order: (1) the A gate; (2a) on the new-cluster
/// branch, one uniform per dimension; (2b) otherwise one roulette draw, then
/// the G gate (only when the cluster has at least min_members_for_rule
/// members), then the placement draws of the chosen branch; (3) one uniform
/// inside adapt_a on failure.
class OeoEngine {
public:
    OeoEngine(OeoConfig config, const Objective& objective, Rng& rng);

    IterationOutcome step();
    void prune();

    bool budget_exhausted() const { return state_.evaluations >= config_.max_evaluations; }
    const ObserverState& state() const { return state_; }
    const std::vector<Cluster>& clusters() const { return clusters_; }
    const OeoConfig& config() const { return config_; }
    double mean_g() const;
    TraceRow trace_row() const;

private:
    double evaluate(const Vec& point);
    void add_cluster(Vec center_point, double cost);
    void append_member(std::size_t idx, Vec point, double cost);
    void refresh_cost_range();

    OeoConfig config_;
    const Objective& objective_;
    Rng& rng_;
    ObserverState state_;
    std::vector<Cluster> clusters_;
    std::vector<ClusterStats> stats_;      // parallel to clusters_
    std::vector<std::size_t> nearest_;     // nearest-center index, parallel
    double global_best_cost_ = 0.0;
    double global_worst_cost_ = 0.0;
};

RunResult run_oeo(const OeoConfig& config, const Objective& objective, Rng& rng,
                  std::uint64_t seed_label);
RunResult run_oeo(const OeoConfig& config, const Objective& objective, std::uint64_t seed);

std::vector<std::pair<std::string, std::string>> config_snapshot(const OeoConfig& config);

}  // namespace oeo
