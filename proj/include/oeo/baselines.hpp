#pragma once

#include <cstdint>
#include <optional>

#include "oeo/core.hpp"
#include "oeo/engine.hpp"

namespace oeo {

struct PsoConfig {
    int swarm_size = 30;
    double inertia = 0.729;
    double c1 = 1.49445;
    double c2 = 1.49445;
    long max_evaluations = 0;
    std::optional<int> reinit_period;  // consumed by the hybrid driver, not pso_run

    void validate() const;
};

struct BatConfig {
    int population = 30;
    double freq_min = 0.0;
    double freq_max = 2.0;
    double loudness0 = 0.5;
    double pulse_rate0 = 0.5;
    double alpha = 0.9;
    double gamma_decay = 0.9;
    long max_evaluations = 0;

    void validate() const;
};

/// One particle's velocity update (constriction-style gbest PSO). Exposed so
/// the update algebra is testable in isolation.
Vec pso_velocity_update(const Vec& velocity, const Vec& position, const Vec& personal_best,
                        const Vec& global_best, double inertia, double c1, double c2, double r1,
                        double r2, const Vec& vmax);

/// Global-best PSO with per-dimension velocity clamping at 20% of the domain
/// width. Trace schema matches the engine's RunResult (adaptive columns
/// empty).
RunResult pso_run(const PsoConfig& config, const Objective& objective, Rng& rng,
                  std::uint64_t seed_label);
RunResult pso_run(const PsoConfig& config, const Objective& objective, std::uint64_t seed);

/// Standard bat algorithm: frequency-tuned velocities, a loudness-gated
/// acceptance step and a pulse-rate-gated local walk around the global best.
RunResult bat_run(const BatConfig& config, const Objective& objective, Rng& rng,
                  std::uint64_t seed_label);
RunResult bat_run(const BatConfig& config, const Objective& objective, std::uint64_t seed);

}  // namespace oeo
