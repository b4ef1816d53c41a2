#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oeo {

using Vec = std::vector<double>;

/// Deterministic random stream shared by every algorithm in the library.
/// A run consumes draws in a fixed documented order, so identical seeds
/// replay identical traces. uniform() maps the top 53 bits of an
/// mt19937_64 word onto [0,1); normal() always consumes exactly two
/// uniforms (Box-Muller, no caching).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    double normal() {
        // u1 in (0,1] so the log is finite; fixed two draws per call
        double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Uniform index in [0, n); n must be >= 1.
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::mt19937_64 gen_;
};

inline Rng seeded_stream(std::uint64_t seed) { return Rng(seed); }

/// Box constraints of the search space, one [lower, upper] interval per
/// dimension. Every Solution in the artifact stays inside these.
struct Bounds {
    Vec lower;
    Vec upper;

    Bounds(Vec lo, Vec hi);

    std::size_t dims() const { return lower.size(); }
    double width(std::size_t i) const { return upper[i] - lower[i]; }
    bool contains(const Vec& point) const;
};

struct Solution {
    Vec point;
    double cost = 0.0;
    long birth_iteration = 0;
};

/// A search locality: a center plus the member solutions found near it.
/// local_g is only consulted in M-OEO mode, where each cluster owns its
/// rule-vs-random probability.
struct Cluster {
    Vec center;
    std::vector<Solution> members;
    double local_g = 0.0;

    double best_cost() const;
    const Solution& best_member() const;
};

enum class Mode { oeo, moeo };

enum class MetricTag {
    sum_fitness_per_volume,
    sum_elite_fitness_per_volume,
    best_fitness_per_volume,
    var_fitness_per_volume,
    mean_elite_fitness,
    subtract_from_nearest_fitness,
};

enum class UpdateTag {
    either_randomly_or_through_best,
    move_through_best,
    select2_choose_between,
    cluster_mean,
    mean_of_elites,
    weighted_mean_of_sols,
    weighted_mean_of_elites,
};

struct EffectivenessMetric {
    MetricTag tag = MetricTag::mean_elite_fitness;
    int elite_count = 3;
};

struct UpdateMethod {
    UpdateTag tag = UpdateTag::mean_of_elites;
    double p = 0.5;  // either_randomly_or_through_best only
    int elite_count = 3;
};

std::string to_string(MetricTag tag);
std::string to_string(UpdateTag tag);
MetricTag metric_tag_from_string(const std::string& name);
UpdateTag update_tag_from_string(const std::string& name);

struct OeoConfig {
    int n_clusters_init = 10;
    double a_start = 0.3;
    double b_start = 0.16;
    double g_start = 0.2;
    double m1 = 5.4;
    double m2 = 3.9;
    double step_scale = 0.01;
    double delta_a = 0.02;
    double delta_g = 0.02;
    int min_members_for_rule = 4;
    int prune_period = 4;
    int per_cluster_cap = 15;
    /// Total retained-solution budget enforced at prune time; the worst
    /// members anywhere are dropped down to this count and clusters emptied
    /// by the sweep are deleted. 0 means n_clusters_init * per_cluster_cap.
    int max_total_solutions = 0;
    UpdateMethod update_method{UpdateTag::mean_of_elites};
    EffectivenessMetric effectiveness_metric{MetricTag::mean_elite_fitness};
    double lambda = 18.0;
    long max_evaluations = 0;
    Mode mode = Mode::oeo;
    /// Algorithm 1's pseudocode and the prose section disagree on which side
    /// of the G comparison triggers the rule-based update; the default
    /// follows the prose (rand < G -> rule based). Setting this flips to the
    /// pseudocode reading for A/B experiments.
    bool algorithm1_g_branch = false;

    double a_min = 0.01, a_max = 0.99;
    double b_min = 0.0, b_max = 10.0;
    double g_min = 0.01, g_max = 0.99;

    /// Presets from the published metric/parameter preference table.
    static OeoConfig simple();    // scalar G, MeanOfElites / MeanEliteFitness
    static OeoConfig modified();  // per-cluster G, GetWeightedMeanOfSols / SubtractFromNearestFitness

    void validate() const;
};

/// The adaptive triple plus run counters. A, B and the scalar G always stay
/// inside their configured clamp intervals; per-cluster G values (M-OEO)
/// live on the clusters themselves.
struct ObserverState {
    double a = 0.0;
    double b = 0.0;
    double g = 0.0;
    long iteration = 0;
    long evaluations = 0;
    Solution best;
};

/// A pure cost function over a box domain. grad may be empty; when present
/// it must be the analytic gradient of eval.
struct Objective {
    std::size_t dims = 0;
    Bounds bounds;
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;

    bool has_gradient() const { return static_cast<bool>(grad); }
};

/// Uniform sample in the box: lower + u * (upper - lower), one uniform
/// draw per coordinate in dimension order.
Vec random_point(const Bounds& bounds, Rng& rng);

/// Component-wise projection into the box. Non-finite coordinates are
/// rejected rather than silently projected.
Vec clamp_to_bounds(Vec point, const Bounds& bounds);

}  // namespace oeo
