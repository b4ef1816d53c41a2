#include "oeo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oeo {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TraceRow plain_row(long iteration, long evaluations, double best_cost) {
    TraceRow row;
    row.iteration = iteration;
    row.evaluations = evaluations;
    row.best_cost = best_cost;
    return row;
}

}  // namespace

void PsoConfig::validate() const {
    if (swarm_size < 2) throw std::invalid_argument("pso: swarm_size >= 2");
    if (max_evaluations < swarm_size)
        throw std::invalid_argument("pso: max_evaluations >= swarm_size");
    if (inertia < 0.0 || c1 < 0.0 || c2 < 0.0)
        throw std::invalid_argument("pso: nonnegative coefficients required");
}

void BatConfig::validate() const {
    if (population < 2) throw std::invalid_argument("bat: population >= 2");
    if (freq_min >= freq_max) throw std::invalid_argument("bat: freq_min < freq_max");
    if (max_evaluations < population)
        throw std::invalid_argument("bat: max_evaluations >= population");
    if (loudness0 < 0.0 || pulse_rate0 < 0.0 || pulse_rate0 > 1.0)
        throw std::invalid_argument("bat: invalid loudness/pulse rate");
    if (alpha <= 0.0 || alpha > 1.0 || gamma_decay <= 0.0)
        throw std::invalid_argument("bat: invalid schedule constants");
}

Vec pso_velocity_update(const Vec& velocity, const Vec& position, const Vec& personal_best,
                        const Vec& global_best, double inertia, double c1, double c2, double r1,
                        double r2, const Vec& vmax) {
    Vec v(velocity.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = inertia * velocity[i] + c1 * r1 * (personal_best[i] - position[i]) +
               c2 * r2 * (global_best[i] - position[i]);
        v[i] = std::clamp(v[i], -vmax[i], vmax[i]);
    }
    return v;
}

RunResult pso_run(const PsoConfig& config, const Objective& objective, Rng& rng,
                  std::uint64_t seed_label) {
    config.validate();
    const std::size_t dims = objective.dims;
    const std::size_t n = static_cast<std::size_t>(config.swarm_size);
    const Bounds& bounds = objective.bounds;

    Vec vmax(dims);
    for (std::size_t i = 0; i < dims; ++i) vmax[i] = 0.2 * bounds.width(i);

    long evaluations = 0;
    auto evaluate = [&](const Vec& x) {
        double c = objective.eval(x);
        if (!std::isfinite(c)) throw std::runtime_error("objective returned non-finite cost");
        ++evaluations;
        return c;
    };

    std::vector<Vec> position(n), velocity(n, Vec(dims, 0.0)), pbest(n);
    std::vector<double> pbest_cost(n);
    Solution gbest;
    gbest.cost = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n; ++i) {
        position[i] = random_point(bounds, rng);
        double c = evaluate(position[i]);
        pbest[i] = position[i];
        pbest_cost[i] = c;
        if (c < gbest.cost) gbest = Solution{position[i], c, 0};
    }

    RunResult result;
    result.seed = seed_label;
    result.config = {{"algorithm", "pso"},
                     {"swarm_size", std::to_string(config.swarm_size)},
                     {"inertia", fmt(config.inertia)},
                     {"c1", fmt(config.c1)},
                     {"c2", fmt(config.c2)},
                     {"max_evaluations", std::to_string(config.max_evaluations)}};
    result.trace.push_back(plain_row(0, evaluations, gbest.cost));

    long iteration = 0;
    while (evaluations < config.max_evaluations) {
        ++iteration;
        for (std::size_t i = 0; i < n && evaluations < config.max_evaluations; ++i) {
            double r1 = rng.uniform();
            double r2 = rng.uniform();
            velocity[i] = pso_velocity_update(velocity[i], position[i], pbest[i], gbest.point,
                                              config.inertia, config.c1, config.c2, r1, r2, vmax);
            for (std::size_t d = 0; d < dims; ++d) {
                position[i][d] =
                    std::clamp(position[i][d] + velocity[i][d], bounds.lower[d], bounds.upper[d]);
            }
            double c = evaluate(position[i]);
            if (c < pbest_cost[i]) {
                pbest[i] = position[i];
                pbest_cost[i] = c;
            }
            if (c < gbest.cost) gbest = Solution{position[i], c, iteration};
        }
        result.trace.push_back(plain_row(iteration, evaluations, gbest.cost));
    }
    result.best = gbest;
    return result;
}

RunResult pso_run(const PsoConfig& config, const Objective& objective, std::uint64_t seed) {
    Rng rng(seed);
    return pso_run(config, objective, rng, seed);
}

RunResult bat_run(const BatConfig& config, const Objective& objective, Rng& rng,
                  std::uint64_t seed_label) {
    config.validate();
    const std::size_t dims = objective.dims;
    const std::size_t n = static_cast<std::size_t>(config.population);
    const Bounds& bounds = objective.bounds;

    long evaluations = 0;
    auto evaluate = [&](const Vec& x) {
        double c = objective.eval(x);
        if (!std::isfinite(c)) throw std::runtime_error("objective returned non-finite cost");
        ++evaluations;
        return c;
    };

    std::vector<Vec> position(n), velocity(n, Vec(dims, 0.0));
    std::vector<double> cost(n), loudness(n, config.loudness0), pulse_rate(n, 0.0);
    Solution gbest;
    gbest.cost = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n; ++i) {
        position[i] = random_point(bounds, rng);
        cost[i] = evaluate(position[i]);
        if (cost[i] < gbest.cost) gbest = Solution{position[i], cost[i], 0};
    }

    RunResult result;
    result.seed = seed_label;
    result.config = {{"algorithm", "bat"},
                     {"population", std::to_string(config.population)},
                     {"freq_min", fmt(config.freq_min)},
                     {"freq_max", fmt(config.freq_max)},
                     {"loudness0", fmt(config.loudness0)},
                     {"pulse_rate0", fmt(config.pulse_rate0)},
                     {"alpha", fmt(config.alpha)},
                     {"gamma_decay", fmt(config.gamma_decay)},
                     {"max_evaluations", std::to_string(config.max_evaluations)}};
    result.trace.push_back(plain_row(0, evaluations, gbest.cost));

    double mean_loudness = config.loudness0;
    long iteration = 0;
    while (evaluations < config.max_evaluations) {
        ++iteration;
        for (std::size_t i = 0; i < n && evaluations < config.max_evaluations; ++i) {
            const double freq =
                config.freq_min + (config.freq_max - config.freq_min) * rng.uniform();
            Vec candidate(dims);
            for (std::size_t d = 0; d < dims; ++d) {
                velocity[i][d] += (position[i][d] - gbest.point[d]) * freq;
                candidate[d] =
                    std::clamp(position[i][d] + velocity[i][d], bounds.lower[d], bounds.upper[d]);
            }
            if (rng.uniform() > pulse_rate[i]) {
                // local walk around the best, scaled by the mean loudness
                for (std::size_t d = 0; d < dims; ++d) {
                    double eps = rng.uniform(-1.0, 1.0);
                    candidate[d] = std::clamp(gbest.point[d] + eps * mean_loudness * 0.1 *
                                                                   bounds.width(d),
                                              bounds.lower[d], bounds.upper[d]);
                }
            }
            double c = evaluate(candidate);
            if (rng.uniform() < loudness[i] && c <= cost[i]) {
                position[i] = candidate;
                cost[i] = c;
                loudness[i] *= config.alpha;
                pulse_rate[i] = config.pulse_rate0 *
                                (1.0 - std::exp(-config.gamma_decay * static_cast<double>(iteration)));
                if (c < gbest.cost) gbest = Solution{candidate, c, iteration};
            }
        }
        mean_loudness = 0.0;
        for (double l : loudness) mean_loudness += l;
        mean_loudness /= static_cast<double>(n);
        result.trace.push_back(plain_row(iteration, evaluations, gbest.cost));
    }
    result.best = gbest;
    return result;
}

RunResult bat_run(const BatConfig& config, const Objective& objective, std::uint64_t seed) {
    Rng rng(seed);
    return bat_run(config, objective, rng, seed);
}

}  // namespace oeo
