#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oeo/core.hpp"

namespace oeo {

enum class BenchmarkName {
    sphere,
    rastrigin,
    ackley,
    griewank,
    shekel,
    penalty_band,
    gaussian,
};

std::string to_string(BenchmarkName name);
BenchmarkName benchmark_name_from_string(const std::string& name);

struct Peak {
    Vec center;
    double sigma = 0.1;
    double depth = 1.0;
};

/// A fully specified objective landscape, including its known optimum.
/// Gaussian instances carry their generator seed so they serialize to the
/// experiment config format and replay exactly.
struct LandscapeSpec {
    LandscapeSpec(BenchmarkName n, std::size_t d, Bounds b)
        : name(n), dims(d), bounds(std::move(b)) {}

    BenchmarkName name = BenchmarkName::sphere;
    std::size_t dims = 0;
    Bounds bounds;
    std::vector<Peak> peaks;                 // gaussian only
    std::optional<double> penalty_weight;    // penalty_band only
    std::uint64_t seed = 0;
    std::size_t n_dense = 0, n_sparse = 0;   // gaussian generator inputs
    Vec optimum_point;
    double optimum_value = 0.0;
    bool smooth = true;
};

double eval_benchmark(const LandscapeSpec& spec, const Vec& x);

/// Analytic gradient; only valid for smooth specs.
Vec benchmark_gradient(const LandscapeSpec& spec, const Vec& x);

/// Count of coordinates outside [lo, hi], scaled by `weight` (the voltage
/// violation penalty pattern: weight 1e6 on the [0.95, 1.05] band).
double penalty_box(const Vec& x, double lo, double hi, double weight);

/// Multimodal landscape with a dense clump of peaks in a sub-box spanning
/// 10% of each dimension and the rest spread across the domain. Exactly one
/// peak (always a sparse one) is deepest, by a depth margin of at least 0.1
/// over every other peak and by construction deep enough that the global
/// minimum lies in its basin; the recorded optimum is polished to the true
/// basin minimum.
LandscapeSpec gaussian_landscape(std::size_t dims, std::size_t n_dense_region_peaks,
                                 std::size_t n_sparse_peaks, std::uint64_t seed);

/// Named standard instance at the given dimension (shekel is fixed 4-D).
LandscapeSpec make_benchmark(BenchmarkName name, std::size_t dims);

Objective to_objective(const LandscapeSpec& spec);

/// Tags of the standard registry (gaussian excluded; instances are made via
/// the generator).
std::vector<BenchmarkName> benchmark_registry();

}  // namespace oeo
