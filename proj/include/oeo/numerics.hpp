#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "oeo/core.hpp"

namespace oeo {

/// Symmetric positive definite matrix, validated on construction
/// (symmetry to 1e-10, positive definiteness via Cholesky).
class SpdMatrix {
public:
    explicit SpdMatrix(Eigen::MatrixXd m);

    const Eigen::MatrixXd& mat() const { return mat_; }
    Eigen::Index size() const { return mat_.rows(); }

private:
    Eigen::MatrixXd mat_;
};

/// Generalized Rayleigh quotient w'Aw / w'Bw. Scale invariant in w.
double rayleigh(const Eigen::VectorXd& w, const SpdMatrix& numerator,
                const SpdMatrix& denominator);

struct GevResult {
    Eigen::MatrixXd vectors;      // N x k, columns satisfy w' C_den w = 1
    std::vector<double> values;   // descending
};

/// Top-k generalized eigenpairs of C_num w = lambda C_den w by simultaneous
/// power iteration on C_den^-1 C_num with a small guard block, followed by a
/// Rayleigh-Ritz reduction and a short Rayleigh-quotient-iteration polish.
/// `iters` counts the power sweeps (the hybrid optimizer uses 7).
GevResult gev_power(const SpdMatrix& numerator, const SpdMatrix& denominator, int k, int iters);

struct AdamState {
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    long step_count = 0;
    double learning_rate = 0.2;
    double momentum1 = 0.9;
    double momentum2 = 0.9;
    double epsilon = 1e-8;

    explicit AdamState(Eigen::Index dims)
        : first_moment(Eigen::VectorXd::Zero(dims)), second_moment(Eigen::VectorXd::Zero(dims)) {}
};

/// One bias-corrected Adam update; returns the new parameters and advances
/// the state. A zero gradient leaves the parameters unchanged.
Eigen::VectorXd adam_step(const Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                          AdamState& state);

/// Zero out gradient entries that are non-finite or larger than 1e6 in
/// magnitude (corrupted-entry guard ahead of the Adam update).
Eigen::VectorXd sanitize_gradient(Eigen::VectorXd grad);
Eigen::MatrixXd sanitize_gradient(Eigen::MatrixXd grad);

/// Central-difference gradient, h relative to coordinate scale.
Vec finite_diff(const std::function<double(const Vec&)>& eval, const Vec& x, double h = 1e-6);
Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& eval,
                            const Eigen::VectorXd& x, double h = 1e-6);

/// Random SPD matrix Q diag(lambda) Q' with a random orthogonal Q and a
/// log-uniform spectrum in [1e-3, 1e-3 * condition_cap].
SpdMatrix random_spd(int n, Rng& rng, double condition_cap = 1e4);

}  // namespace oeo
