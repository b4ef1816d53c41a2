#include "oeo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oeo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shekel foxholes, 4-D, m = 10 (classic tables)
constexpr double kShekelA[10][4] = {
    {4, 4, 4, 4}, {1, 1, 1, 1}, {8, 8, 8, 8}, {6, 6, 6, 6}, {3, 7, 3, 7},
    {2, 9, 2, 9}, {5, 5, 3, 3}, {8, 1, 8, 1}, {6, 2, 6, 2}, {7, 3.6, 7, 3.6}};
constexpr double kShekelC[10] = {0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};

double sphere_eval(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rastrigin_eval(const Vec& x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * kPi * v);
    return s;
}

double ackley_eval(const Vec& x) {
    const double d = static_cast<double>(x.size());
    double sq = 0.0, cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(2.0 * kPi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + std::exp(1.0);
}

double griewank_eval(const Vec& x) {
    double sum = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * x[i] / 4000.0;
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sum - prod;
}

double shekel_eval(const Vec& x) {
    double s = 0.0;
    for (int j = 0; j < 10; ++j) {
        double den = kShekelC[j];
        for (int i = 0; i < 4; ++i) den += (x[i] - kShekelA[j][i]) * (x[i] - kShekelA[j][i]);
        s -= 1.0 / den;
    }
    return s;
}

double gaussian_eval(const std::vector<Peak>& peaks, const Vec& x) {
    double s = 0.0;
    for (const auto& p : peaks) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - p.center[i]) * (x[i] - p.center[i]);
        s -= p.depth * std::exp(-d2 / (2.0 * p.sigma * p.sigma));
    }
    return s;
}

Vec gaussian_grad(const std::vector<Peak>& peaks, const Vec& x) {
    Vec g(x.size(), 0.0);
    for (const auto& p : peaks) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - p.center[i]) * (x[i] - p.center[i]);
        const double e = p.depth * std::exp(-d2 / (2.0 * p.sigma * p.sigma)) / (p.sigma * p.sigma);
        for (std::size_t i = 0; i < x.size(); ++i) g[i] += e * (x[i] - p.center[i]);
    }
    return g;
}

}  // namespace

std::string to_string(BenchmarkName name) {
    switch (name) {
        case BenchmarkName::sphere: return "sphere";
        case BenchmarkName::rastrigin: return "rastrigin";
        case BenchmarkName::ackley: return "ackley";
        case BenchmarkName::griewank: return "griewank";
        case BenchmarkName::shekel: return "shekel";
        case BenchmarkName::penalty_band: return "penalty_band";
        case BenchmarkName::gaussian: return "gaussian";
    }
    throw std::logic_error("unreachable benchmark name");
}

BenchmarkName benchmark_name_from_string(const std::string& name) {
    for (auto b : {BenchmarkName::sphere, BenchmarkName::rastrigin, BenchmarkName::ackley,
                   BenchmarkName::griewank, BenchmarkName::shekel, BenchmarkName::penalty_band,
                   BenchmarkName::gaussian}) {
        if (to_string(b) == name) return b;
    }
    throw std::invalid_argument("unknown benchmark: " + name);
}

double eval_benchmark(const LandscapeSpec& spec, const Vec& x) {
    if (x.size() != spec.dims) throw std::invalid_argument("benchmark: dimension mismatch");
    if (!spec.bounds.contains(x)) throw std::invalid_argument("benchmark: point out of bounds");
    switch (spec.name) {
        case BenchmarkName::sphere: return sphere_eval(x);
        case BenchmarkName::rastrigin: return rastrigin_eval(x);
        case BenchmarkName::ackley: return ackley_eval(x);
        case BenchmarkName::griewank: return griewank_eval(x);
        case BenchmarkName::shekel: return shekel_eval(x);
        case BenchmarkName::penalty_band: {
            double s = 0.0;
            for (double v : x) s += std::abs(v - 1.0);
            return s + penalty_box(x, 0.95, 1.05, spec.penalty_weight.value_or(1e6));
        }
        case BenchmarkName::gaussian: return gaussian_eval(spec.peaks, x);
    }
    throw std::logic_error("unreachable benchmark name");
}

Vec benchmark_gradient(const LandscapeSpec& spec, const Vec& x) {
    if (!spec.smooth) throw std::invalid_argument("benchmark: no analytic gradient");
    if (x.size() != spec.dims) throw std::invalid_argument("benchmark: dimension mismatch");
    Vec g(x.size(), 0.0);
    switch (spec.name) {
        case BenchmarkName::sphere:
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
            return g;
        case BenchmarkName::rastrigin:
            for (std::size_t i = 0; i < x.size(); ++i)
                g[i] = 2.0 * x[i] + 20.0 * kPi * std::sin(2.0 * kPi * x[i]);
            return g;
        case BenchmarkName::ackley: {
            const double d = static_cast<double>(x.size());
            double sq = 0.0, cs = 0.0;
            for (double v : x) {
                sq += v * v;
                cs += std::cos(2.0 * kPi * v);
            }
            const double r = std::sqrt(sq / d);
            const double e1 = std::exp(-0.2 * r);
            const double e2 = std::exp(cs / d);
            for (std::size_t i = 0; i < x.size(); ++i) {
                double t1 = r > 0.0 ? 4.0 * e1 * x[i] / (d * r) : 0.0;
                double t2 = e2 * 2.0 * kPi * std::sin(2.0 * kPi * x[i]) / d;
                g[i] = t1 + t2;
            }
            return g;
        }
        case BenchmarkName::griewank: {
            double prod = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double si = std::sqrt(static_cast<double>(i + 1));
                const double ci = std::cos(x[i] / si);
                double rest = ci != 0.0 ? prod / ci : 1.0;
                if (ci == 0.0) {
                    rest = 1.0;
                    for (std::size_t j = 0; j < x.size(); ++j) {
                        if (j == i) continue;
                        rest *= std::cos(x[j] / std::sqrt(static_cast<double>(j + 1)));
                    }
                }
                g[i] = x[i] / 2000.0 + std::sin(x[i] / si) / si * rest;
            }
            return g;
        }
        case BenchmarkName::shekel:
            for (int j = 0; j < 10; ++j) {
                double den = kShekelC[j];
                for (int i = 0; i < 4; ++i) den += (x[i] - kShekelA[j][i]) * (x[i] - kShekelA[j][i]);
                for (int i = 0; i < 4; ++i) g[i] += 2.0 * (x[i] - kShekelA[j][i]) / (den * den);
            }
            return g;
        case BenchmarkName::gaussian: return gaussian_grad(spec.peaks, x);
        case BenchmarkName::penalty_band: break;
    }
    throw std::invalid_argument("benchmark: no analytic gradient");
}

double penalty_box(const Vec& x, double lo, double hi, double weight) {
    if (lo >= hi) throw std::invalid_argument("penalty_box: lo < hi required");
    double count = 0.0;
    for (double v : x) {
        if (v > hi || v < lo) count += 1.0;
    }
    return weight * count;
}

LandscapeSpec gaussian_landscape(std::size_t dims, std::size_t n_dense_region_peaks,
                                 std::size_t n_sparse_peaks, std::uint64_t seed) {
    if (dims < 1 || n_dense_region_peaks < 1 || n_sparse_peaks < 1)
        throw std::invalid_argument("gaussian_landscape: dims and peak counts >= 1");
    Rng rng(seed);
    LandscapeSpec spec(BenchmarkName::gaussian, dims, Bounds(Vec(dims, 0.0), Vec(dims, 1.0)));
    spec.seed = seed;
    spec.n_dense = n_dense_region_peaks;
    spec.n_sparse = n_sparse_peaks;

    // dense sub-box spanning 10% of each dimension at a random offset
    Vec box_lo(dims);
    for (std::size_t i = 0; i < dims; ++i) box_lo[i] = rng.uniform() * 0.9;

    auto in_dense_box = [&](const Vec& p) {
        for (std::size_t i = 0; i < dims; ++i) {
            if (p[i] < box_lo[i] || p[i] > box_lo[i] + 0.1) return false;
        }
        return true;
    };

    for (std::size_t j = 0; j < n_dense_region_peaks; ++j) {
        Peak p;
        p.center.resize(dims);
        for (std::size_t i = 0; i < dims; ++i) p.center[i] = box_lo[i] + rng.uniform() * 0.1;
        p.sigma = 0.02 + rng.uniform() * 0.03;
        p.depth = 0.3 + rng.uniform() * 0.4;
        spec.peaks.push_back(std::move(p));
    }
    for (std::size_t j = 0; j < n_sparse_peaks; ++j) {
        Peak p;
        p.center.resize(dims);
        do {
            for (std::size_t i = 0; i < dims; ++i) p.center[i] = rng.uniform();
        } while (in_dense_box(p.center));
        p.sigma = 0.05 + rng.uniform() * 0.05;
        p.depth = 0.3 + rng.uniform() * 0.4;
        spec.peaks.push_back(std::move(p));
    }

    // one sparse peak is made deeper than the sum of all other depths, which
    // pins the global minimum inside its basin; margin over the runner-up
    // depth is at least 0.1 by construction
    const std::size_t deepest =
        n_dense_region_peaks + rng.index(n_sparse_peaks);
    double others = 0.0;
    for (std::size_t j = 0; j < spec.peaks.size(); ++j) {
        if (j != deepest) others += spec.peaks[j].depth;
    }
    spec.peaks[deepest].depth = others + 0.1 + rng.uniform() * 0.1;

    // polish the recorded optimum to the basin minimum (cross-talk from the
    // other peaks shifts it slightly off the center)
    Vec x = spec.peaks[deepest].center;
    for (int it = 0; it < 200; ++it) {
        Vec g = gaussian_grad(spec.peaks, x);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        if (gn < 1e-26) break;
        double step = spec.peaks[deepest].sigma * spec.peaks[deepest].sigma;
        double f0 = gaussian_eval(spec.peaks, x);
        for (int back = 0; back < 40; ++back) {
            Vec trial(dims);
            for (std::size_t i = 0; i < dims; ++i)
                trial[i] = std::clamp(x[i] - step * g[i], 0.0, 1.0);
            if (gaussian_eval(spec.peaks, trial) < f0) {
                x = std::move(trial);
                break;
            }
            step *= 0.5;
        }
    }
    spec.optimum_point = x;
    spec.optimum_value = gaussian_eval(spec.peaks, x);
    return spec;
}

LandscapeSpec make_benchmark(BenchmarkName name, std::size_t dims) {
    if (name == BenchmarkName::shekel) dims = 4;
    if (dims < 1) throw std::invalid_argument("benchmark: dims >= 1");
    switch (name) {
        case BenchmarkName::sphere: {
            LandscapeSpec s(name, dims, Bounds(Vec(dims, -5.12), Vec(dims, 5.12)));
            s.optimum_point = Vec(dims, 0.0);
            s.optimum_value = 0.0;
            return s;
        }
        case BenchmarkName::rastrigin: {
            LandscapeSpec s(name, dims, Bounds(Vec(dims, -5.12), Vec(dims, 5.12)));
            s.optimum_point = Vec(dims, 0.0);
            s.optimum_value = 0.0;
            return s;
        }
        case BenchmarkName::ackley: {
            LandscapeSpec s(name, dims, Bounds(Vec(dims, -32.768), Vec(dims, 32.768)));
            s.optimum_point = Vec(dims, 0.0);
            s.optimum_value = 0.0;
            return s;
        }
        case BenchmarkName::griewank: {
            LandscapeSpec s(name, dims, Bounds(Vec(dims, -600.0), Vec(dims, 600.0)));
            s.optimum_point = Vec(dims, 0.0);
            s.optimum_value = 0.0;
            return s;
        }
        case BenchmarkName::shekel: {
            LandscapeSpec s(name, 4, Bounds(Vec(4, 0.0), Vec(4, 10.0)));
            s.optimum_point = {4.000746531, 4.000592935, 3.999663399, 3.999510883};
            s.optimum_value = shekel_eval(s.optimum_point);
            return s;
        }
        case BenchmarkName::penalty_band: {
            LandscapeSpec s(name, dims, Bounds(Vec(dims, 0.5), Vec(dims, 1.5)));
            s.penalty_weight = 1e6;
            s.optimum_point = Vec(dims, 1.0);
            s.optimum_value = 0.0;
            s.smooth = false;
            return s;
        }
        case BenchmarkName::gaussian:
            throw std::invalid_argument("gaussian instances come from gaussian_landscape()");
    }
    throw std::logic_error("unreachable benchmark name");
}

Objective to_objective(const LandscapeSpec& spec) {
    Objective obj{spec.dims, spec.bounds,
                  [spec](const Vec& x) { return eval_benchmark(spec, x); },
                  {}};
    if (spec.smooth) {
        obj.grad = [spec](const Vec& x) { return benchmark_gradient(spec, x); };
    }
    return obj;
}

std::vector<BenchmarkName> benchmark_registry() {
    return {BenchmarkName::sphere,   BenchmarkName::rastrigin,    BenchmarkName::ackley,
            BenchmarkName::griewank, BenchmarkName::shekel,       BenchmarkName::penalty_band};
}

}  // namespace oeo
