#include "oeo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oeo {

namespace {

constexpr double kSanitizeCap = 1e6;
constexpr double kConditionLimit = 1e12;

/// Largest/smallest eigenvalue estimate of an SPD matrix by (inverse) power
/// iteration; used only as a condition-number guard.
double condition_estimate(const Eigen::MatrixXd& m, const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const Eigen::Index n = m.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    for (int i = 0; i < 30; ++i) v = (m * v).normalized();
    double lam_max = v.dot(m * v);
    v = Eigen::VectorXd::Ones(n).normalized();
    for (int i = 0; i < 30; ++i) v = llt.solve(v).normalized();
    double lam_min = v.dot(m * v);
    if (lam_min <= 0.0) return std::numeric_limits<double>::infinity();
    return lam_max / lam_min;
}

/// Jacobi eigenvalue iteration for small symmetric matrices (the
/// Rayleigh-Ritz reduction inside gev_power; block sizes stay <= k+2).
void jacobi_eigh(Eigen::MatrixXd a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const Eigen::Index n = a.rows();
    vectors = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                Eigen::JacobiRotation<double> rot(c, s);
                a.applyOnTheLeft(p, q, rot.adjoint());
                a.applyOnTheRight(p, q, rot);
                vectors.applyOnTheRight(p, q, rot);
            }
        }
    }
    values = a.diagonal();
}

}  // namespace

SpdMatrix::SpdMatrix(Eigen::MatrixXd m) : mat_(std::move(m)) {
    if (mat_.rows() == 0 || mat_.rows() != mat_.cols())
        throw std::invalid_argument("spd: square non-empty matrix required");
    if (!mat_.allFinite()) throw std::invalid_argument("spd: non-finite entries");
    double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
    if ((mat_ - mat_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("spd: matrix not symmetric");
    mat_ = 0.5 * (mat_ + mat_.transpose().eval());
    Eigen::LLT<Eigen::MatrixXd> llt(mat_);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("spd: matrix not positive definite");
}

double rayleigh(const Eigen::VectorXd& w, const SpdMatrix& numerator,
                const SpdMatrix& denominator) {
    if (w.size() != numerator.size() || w.size() != denominator.size())
        throw std::invalid_argument("rayleigh: dimension mismatch");
    if (w.norm() == 0.0) throw std::invalid_argument("rayleigh: zero vector");
    double den = w.dot(denominator.mat() * w);
    return w.dot(numerator.mat() * w) / den;
}

GevResult gev_power(const SpdMatrix& numerator, const SpdMatrix& denominator, int k, int iters) {
    const Eigen::Index n = numerator.size();
    if (denominator.size() != n) throw std::invalid_argument("gev: dimension mismatch");
    if (k < 1 || k > n) throw std::invalid_argument("gev: need 1 <= k <= N");
    if (iters < 1) throw std::invalid_argument("gev: iters >= 1");

    const Eigen::MatrixXd& a = numerator.mat();
    const Eigen::MatrixXd& bm = denominator.mat();
    Eigen::LLT<Eigen::MatrixXd> llt(bm);
    if (llt.info() != Eigen::Success || condition_estimate(bm, llt) > kConditionLimit)
        throw std::invalid_argument("gev: denominator matrix is numerically singular");

    const Eigen::Index block = std::min<Eigen::Index>(n, k + 2);

    auto b_orthonormalize = [&](Eigen::MatrixXd& v) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            for (Eigen::Index i = 0; i < j; ++i) {
                v.col(j) -= v.col(i) * (v.col(i).dot(bm * v.col(j)));
            }
            double norm = std::sqrt(v.col(j).dot(bm * v.col(j)));
            if (norm < 1e-150) {
                // re-seed a collapsed direction deterministically
                v.col(j) = Eigen::VectorXd::Unit(n, j % n);
                for (Eigen::Index i = 0; i < j; ++i)
                    v.col(j) -= v.col(i) * (v.col(i).dot(bm * v.col(j)));
                norm = std::sqrt(v.col(j).dot(bm * v.col(j)));
            }
            v.col(j) /= norm;
        }
    };

    // deterministic start block
    Eigen::MatrixXd v(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        v.col(j) = Eigen::VectorXd::Constant(n, 0.1);
        v(j % n, j) += 1.0;
        for (Eigen::Index r = 0; r < n; ++r) v(r, j) += 1e-3 * static_cast<double>(r);
    }
    b_orthonormalize(v);
    for (int it = 0; it < iters; ++it) {
        v = llt.solve(a * v);
        b_orthonormalize(v);
    }

    // Rayleigh-Ritz on the block span: V' C_den V = I, diagonalize V' C_num V
    Eigen::MatrixXd s = v.transpose() * a * v;
    s = 0.5 * (s + s.transpose().eval());
    Eigen::VectorXd ritz_values;
    Eigen::MatrixXd ritz_vectors;
    jacobi_eigh(s, ritz_values, ritz_vectors);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(block));
    for (Eigen::Index i = 0; i < block; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index x, Eigen::Index y) { return ritz_values(x) > ritz_values(y); });

    Eigen::MatrixXd w(n, k);
    std::vector<double> values(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        w.col(c) = v * ritz_vectors.col(order[static_cast<std::size_t>(c)]);
        values[static_cast<std::size_t>(c)] = ritz_values(order[static_cast<std::size_t>(c)]);
    }

    // Rayleigh-quotient-iteration polish, deflating previously locked pairs
    for (int c = 0; c < k; ++c) {
        Eigen::VectorXd vec = w.col(c);
        double sigma = values[static_cast<std::size_t>(c)];
        for (int step = 0; step < 3; ++step) {
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(a - sigma * bm);
            Eigen::VectorXd y = lu.solve(bm * vec);
            if (!y.allFinite()) break;
            for (int i = 0; i < c; ++i) y -= w.col(i) * (w.col(i).dot(bm * y));
            double norm = std::sqrt(y.dot(bm * y));
            if (!std::isfinite(norm) || norm < 1e-280) break;
            vec = y / norm;
            sigma = vec.dot(a * vec);
        }
        w.col(c) = vec;
        values[static_cast<std::size_t>(c)] = sigma;
    }

    // keep the descending order (polish can reorder near-degenerate pairs)
    std::vector<int> final_order(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) final_order[static_cast<std::size_t>(i)] = i;
    std::sort(final_order.begin(), final_order.end(),
              [&](int x, int y) { return values[static_cast<std::size_t>(x)] > values[static_cast<std::size_t>(y)]; });
    GevResult result;
    result.vectors.resize(n, k);
    result.values.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        result.vectors.col(c) = w.col(final_order[static_cast<std::size_t>(c)]);
        result.values[static_cast<std::size_t>(c)] =
            values[static_cast<std::size_t>(final_order[static_cast<std::size_t>(c)])];
    }
    return result;
}

Eigen::VectorXd adam_step(const Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                          AdamState& state) {
    if (params.size() != grad.size() || params.size() != state.first_moment.size())
        throw std::invalid_argument("adam: dimension mismatch");
    ++state.step_count;
    const double b1 = state.momentum1;
    const double b2 = state.momentum2;
    state.first_moment = b1 * state.first_moment + (1.0 - b1) * grad;
    state.second_moment =
        (b2 * state.second_moment.array() + (1.0 - b2) * grad.array().square()).matrix();
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    Eigen::ArrayXd m_hat = state.first_moment.array() / corr1;
    Eigen::ArrayXd v_hat = state.second_moment.array() / corr2;
    return params.array() - state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
}

Eigen::VectorXd sanitize_gradient(Eigen::VectorXd grad) {
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad(i)) || std::abs(grad(i)) > kSanitizeCap) grad(i) = 0.0;
    }
    return grad;
}

Eigen::MatrixXd sanitize_gradient(Eigen::MatrixXd grad) {
    for (Eigen::Index j = 0; j < grad.cols(); ++j) {
        for (Eigen::Index i = 0; i < grad.rows(); ++i) {
            if (!std::isfinite(grad(i, j)) || std::abs(grad(i, j)) > kSanitizeCap) grad(i, j) = 0.0;
        }
    }
    return grad;
}

Vec finite_diff(const std::function<double(const Vec&)>& eval, const Vec& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff: h > 0 required");
    Vec grad(x.size());
    Vec probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + step;
        const double up = eval(probe);
        probe[i] = x[i] - step;
        const double down = eval(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& eval,
                            const Eigen::VectorXd& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff: h > 0 required");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x(i)));
        probe(i) = x(i) + step;
        const double up = eval(probe);
        probe(i) = x(i) - step;
        const double down = eval(probe);
        probe(i) = x(i);
        grad(i) = (up - down) / (2.0 * step);
    }
    return grad;
}

SpdMatrix random_spd(int n, Rng& rng, double condition_cap) {
    if (n < 1) throw std::invalid_argument("random_spd: n >= 1");
    if (condition_cap < 1.0) throw std::invalid_argument("random_spd: condition_cap >= 1");
    Eigen::MatrixXd gauss(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) gauss(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (r(i, i) < 0.0) q.col(i) = -q.col(i);  // fix the sign convention
    }
    Eigen::VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = 1e-3 * std::pow(condition_cap, rng.uniform());
    Eigen::MatrixXd m = q * lambda.asDiagonal() * q.transpose();
    return SpdMatrix(0.5 * (m + m.transpose().eval()));
}

}  // namespace oeo
