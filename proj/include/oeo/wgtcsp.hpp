#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oeo/baselines.hpp"
#include "oeo/core.hpp"
#include "oeo/engine.hpp"
#include "oeo/numerics.hpp"

namespace oeo {

/// Per-trial covariance matrices for two classes, all N x N SPD.
struct TrialSet {
    std::vector<SpdMatrix> class1;
    std::vector<SpdMatrix> class2;

    std::size_t trials() const { return class1.size(); }
    Eigen::Index channels() const { return class1.empty() ? 0 : class1.front().size(); }
    void validate() const;  // equal lengths, n >= 2, matching N
};

/// Synthetic stand-in for per-trial covariance data: a per-class SPD base
/// plus per-trial SPD noise. `outlier_trial` marks one trial whose noise is
/// scaled by `outlier_scale` in both classes.
TrialSet make_synthetic_trialset(std::size_t n_trials, int channels, std::uint64_t seed,
                                 std::optional<std::size_t> outlier_trial = std::nullopt,
                                 double outlier_scale = 100.0, double noise_scale = 0.1);

/// Text format: header "wgtcsp v1 n N", then the n class-1 matrices followed
/// by the n class-2 matrices, each row-major, whitespace separated.
void save_trialset(std::ostream& out, const TrialSet& data);
void save_trialset(const std::string& path, const TrialSet& data);
TrialSet load_trialset(std::istream& in);
TrialSet load_trialset(const std::string& path);

struct WgtcspPoint {
    Eigen::VectorXd a;  // per-trial numerator weights, on the clipped simplex
    Eigen::VectorXd b;  // per-trial denominator weights, same constraint
    Eigen::VectorXd w;  // spatial filter, nonzero
};

/// Per-trial quadratic forms at a fixed filter w; turns cost and gradient
/// into O(n) expressions in (a, b).
struct TrialForms {
    Eigen::VectorXd numerator;    // w' Sigma_{i,c} w
    Eigen::VectorXd denominator;  // w' (Sigma_{i,1} + Sigma_{i,2}) w
};
TrialForms trial_forms(const TrialSet& data, const Eigen::VectorXd& w, int target_class);

double cost_from_forms(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const TrialForms& forms);

/// Minimized objective: -(w' (sum a_i Sigma_{i,c}) w) / (w' (sum b_i
/// (Sigma_{i,1}+Sigma_{i,2})) w).
double wgtcsp_cost(const WgtcspPoint& pt, const TrialSet& data, int target_class);

/// Quotient-rule gradient of the minimized cost with respect to a and b.
std::pair<Eigen::VectorXd, Eigen::VectorXd> wgtcsp_grad(const WgtcspPoint& pt,
                                                        const TrialSet& data, int target_class);

/// Clip each entry to [1e-6, 1] and rescale to sum 1.
Eigen::VectorXd project_weights(Eigen::VectorXd v);

/// Weighted pencil matrices for the current (a, b).
SpdMatrix weighted_numerator(const TrialSet& data, const Eigen::VectorXd& a, int target_class);
SpdMatrix weighted_denominator(const TrialSet& data, const Eigen::VectorXd& b);

struct HybridConfig {
    enum class Proposer { random_restart, oeo, moeo, pso };
    Proposer proposer = Proposer::oeo;
    long max_evaluations = 4000;
    int max_outer = 1000000;     // evaluation budget usually binds first
    double gamma_stop = 1e-10;   // stop when sum |a - a_prev| falls below
    int gd_steps = 6;
    int gev_iterations = 7;
    int proposal_evaluations = 60;  // inner metaheuristic budget per proposal
    int target_class = 1;
    double learning_rate = 0.2;
    double momentum1 = 0.9;
    double momentum2 = 0.9;
    OeoConfig oeo = OeoConfig::simple();  // inner proposer template
    PsoConfig pso;                        // inner proposer template (pso)
    std::optional<Eigen::VectorXd> init_a, init_b;  // overrides the random init

    void validate() const;
};

struct HybridResult {
    RunResult run;
    Eigen::VectorXd a, b, w;
};

/// Alternating driver: a metaheuristic (or plain random restart) proposes
/// fresh (a, b) over the box [1e-6, 1]^{2n}, a short Adam descent refines
/// them under projection, and the filter w is refreshed from the weighted
/// pencil after each descent. Every objective evaluation, including the
/// proposal engine's, counts against max_evaluations.
HybridResult oeo_gd_run(const HybridConfig& config, const TrialSet& data, std::uint64_t seed);

}  // namespace oeo
