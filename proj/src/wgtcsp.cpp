#include "oeo/wgtcsp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oeo {

namespace {

constexpr double kWeightFloor = 1e-6;
constexpr double kDenominatorFloor = 1e-12;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_class(int target_class) {
    if (target_class != 1 && target_class != 2)
        throw std::invalid_argument("wgtcsp: target_class must be 1 or 2");
}

}  // namespace

void TrialSet::validate() const {
    if (class1.size() < 2 || class1.size() != class2.size())
        throw std::invalid_argument("trialset: need n >= 2 trials in both classes");
    const Eigen::Index n = class1.front().size();
    for (const auto& m : class1) {
        if (m.size() != n) throw std::invalid_argument("trialset: inconsistent channel count");
    }
    for (const auto& m : class2) {
        if (m.size() != n) throw std::invalid_argument("trialset: inconsistent channel count");
    }
}

TrialSet make_synthetic_trialset(std::size_t n_trials, int channels, std::uint64_t seed,
                                 std::optional<std::size_t> outlier_trial, double outlier_scale,
                                 double noise_scale) {
    if (n_trials < 2) throw std::invalid_argument("trialset: n >= 2");
    if (outlier_trial && *outlier_trial >= n_trials)
        throw std::invalid_argument("trialset: outlier index out of range");
    Rng rng(seed);
    SpdMatrix base1 = random_spd(channels, rng);
    SpdMatrix base2 = random_spd(channels, rng);
    TrialSet data;
    data.class1.reserve(n_trials);
    data.class2.reserve(n_trials);
    for (std::size_t i = 0; i < n_trials; ++i) {
        // the outlier pair is noise-dominated: its class signal is crushed
        // and the burst lands in the second-class recording, so it inflates
        // the pooled denominator without handing the target class extra
        // projected power
        const bool outlier = outlier_trial && *outlier_trial == i;
        const double signal = outlier ? 0.1 : 1.0;
        data.class1.emplace_back(signal * base1.mat() +
                                 noise_scale * random_spd(channels, rng).mat());
        data.class2.emplace_back(signal * base2.mat() +
                                 noise_scale * (outlier ? outlier_scale : 1.0) *
                                     random_spd(channels, rng).mat());
    }
    data.validate();
    return data;
}

void save_trialset(std::ostream& out, const TrialSet& data) {
    data.validate();
    const Eigen::Index n = data.channels();
    out << "wgtcsp v1 " << data.trials() << " " << n << "\n";
    auto dump = [&](const SpdMatrix& m) {
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                out << fmt(m.mat()(r, c)) << (c + 1 == n ? "" : " ");
            }
            out << "\n";
        }
    };
    for (const auto& m : data.class1) dump(m);
    for (const auto& m : data.class2) dump(m);
}

void save_trialset(const std::string& path, const TrialSet& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("trialset: cannot open " + path + " for writing");
    save_trialset(out, data);
}

TrialSet load_trialset(std::istream& in) {
    std::string magic, version;
    std::size_t n_trials = 0;
    Eigen::Index channels = 0;
    if (!(in >> magic >> version >> n_trials >> channels) || magic != "wgtcsp" || version != "v1")
        throw std::runtime_error("trialset: bad header, expected 'wgtcsp v1 n N'");
    auto read_matrix = [&]() {
        Eigen::MatrixXd m(channels, channels);
        for (Eigen::Index r = 0; r < channels; ++r) {
            for (Eigen::Index c = 0; c < channels; ++c) {
                if (!(in >> m(r, c))) throw std::runtime_error("trialset: truncated matrix data");
            }
        }
        return SpdMatrix(std::move(m));
    };
    TrialSet data;
    for (std::size_t i = 0; i < n_trials; ++i) data.class1.push_back(read_matrix());
    for (std::size_t i = 0; i < n_trials; ++i) data.class2.push_back(read_matrix());
    data.validate();
    return data;
}

TrialSet load_trialset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("trialset: cannot open " + path);
    return load_trialset(in);
}

TrialForms trial_forms(const TrialSet& data, const Eigen::VectorXd& w, int target_class) {
    check_class(target_class);
    if (w.size() != data.channels()) throw std::invalid_argument("wgtcsp: w dimension mismatch");
    if (w.norm() == 0.0) throw std::invalid_argument("wgtcsp: w must be nonzero");
    const auto n = static_cast<Eigen::Index>(data.trials());
    TrialForms forms{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double q1 = w.dot(data.class1[idx].mat() * w);
        const double q2 = w.dot(data.class2[idx].mat() * w);
        forms.numerator(i) = target_class == 1 ? q1 : q2;
        forms.denominator(i) = q1 + q2;
    }
    return forms;
}

double cost_from_forms(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const TrialForms& forms) {
    const double num = a.dot(forms.numerator);
    const double den = b.dot(forms.denominator);
    if (den < kDenominatorFloor) throw std::runtime_error("wgtcsp: denominator below 1e-12");
    return -num / den;
}

double wgtcsp_cost(const WgtcspPoint& pt, const TrialSet& data, int target_class) {
    return cost_from_forms(pt.a, pt.b, trial_forms(data, pt.w, target_class));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> wgtcsp_grad(const WgtcspPoint& pt,
                                                        const TrialSet& data, int target_class) {
    const TrialForms forms = trial_forms(data, pt.w, target_class);
    const double num = pt.a.dot(forms.numerator);
    const double den = pt.b.dot(forms.denominator);
    if (den < kDenominatorFloor) throw std::runtime_error("wgtcsp: denominator below 1e-12");
    Eigen::VectorXd grad_a = -forms.numerator / den;
    Eigen::VectorXd grad_b = num * forms.denominator / (den * den);
    return {std::move(grad_a), std::move(grad_b)};
}

Eigen::VectorXd project_weights(Eigen::VectorXd v) {
    if (!v.allFinite()) throw std::invalid_argument("project_weights: non-finite input");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = std::clamp(v(i), kWeightFloor, 1.0);
        sum += v(i);
    }
    return v / sum;
}

SpdMatrix weighted_numerator(const TrialSet& data, const Eigen::VectorXd& a, int target_class) {
    check_class(target_class);
    const auto& cls = target_class == 1 ? data.class1 : data.class2;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(data.channels(), data.channels());
    for (std::size_t i = 0; i < cls.size(); ++i) m += a(static_cast<Eigen::Index>(i)) * cls[i].mat();
    return SpdMatrix(std::move(m));
}

SpdMatrix weighted_denominator(const TrialSet& data, const Eigen::VectorXd& b) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(data.channels(), data.channels());
    for (std::size_t i = 0; i < data.class1.size(); ++i) {
        m += b(static_cast<Eigen::Index>(i)) * (data.class1[i].mat() + data.class2[i].mat());
    }
    return SpdMatrix(std::move(m));
}

void HybridConfig::validate() const {
    if (max_evaluations < 1) throw std::invalid_argument("hybrid: max_evaluations >= 1");
    if (max_outer < 1) throw std::invalid_argument("hybrid: max_outer >= 1");
    if (gd_steps < 1) throw std::invalid_argument("hybrid: gd_steps >= 1");
    if (gev_iterations < 1) throw std::invalid_argument("hybrid: gev_iterations >= 1");
    if (proposal_evaluations < 1) throw std::invalid_argument("hybrid: proposal_evaluations >= 1");
    if (gamma_stop < 0.0) throw std::invalid_argument("hybrid: gamma_stop >= 0");
    if (target_class != 1 && target_class != 2)
        throw std::invalid_argument("hybrid: target_class must be 1 or 2");
}

HybridResult oeo_gd_run(const HybridConfig& config, const TrialSet& data, std::uint64_t seed) {
    config.validate();
    data.validate();
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(data.trials());

    long evaluations = 0;
    TrialForms forms{Eigen::VectorXd(), Eigen::VectorXd()};
    auto eval_weights = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        ++evaluations;
        return cost_from_forms(a, b, forms);
    };

    auto draw_weights = [&]() {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(kWeightFloor, 1.0);
        return project_weights(std::move(v));
    };

    Eigen::VectorXd a = config.init_a ? project_weights(*config.init_a) : draw_weights();
    Eigen::VectorXd b = config.init_b ? project_weights(*config.init_b) : draw_weights();
    if (a.size() != n || b.size() != n) throw std::invalid_argument("hybrid: init weight size");

    Eigen::VectorXd w =
        gev_power(weighted_numerator(data, a, config.target_class), weighted_denominator(data, b),
                  1, config.gev_iterations)
            .vectors.col(0);
    forms = trial_forms(data, w, config.target_class);
    double current_cost = eval_weights(a, b);

    Eigen::VectorXd best_a = a, best_b = b, best_w = w;
    double best_cost = current_cost;
    auto track_best = [&](const Eigen::VectorXd& ca, const Eigen::VectorXd& cb, double cost) {
        if (cost < best_cost) {
            best_cost = cost;
            best_a = ca;
            best_b = cb;
            best_w = w;
        }
    };

    RunResult run;
    run.seed = seed;
    const char* proposer_name =
        config.proposer == HybridConfig::Proposer::random_restart ? "random_restart"
        : config.proposer == HybridConfig::Proposer::oeo          ? "oeo"
        : config.proposer == HybridConfig::Proposer::moeo         ? "moeo"
                                                                  : "pso";
    run.config = {{"proposer", proposer_name},
                  {"max_evaluations", std::to_string(config.max_evaluations)},
                  {"gd_steps", std::to_string(config.gd_steps)},
                  {"gev_iterations", std::to_string(config.gev_iterations)},
                  {"proposal_evaluations", std::to_string(config.proposal_evaluations)},
                  {"gamma_stop", fmt(config.gamma_stop)},
                  {"learning_rate", fmt(config.learning_rate)},
                  {"target_class", std::to_string(config.target_class)}};
    TraceRow row0;
    row0.iteration = 0;
    row0.evaluations = evaluations;
    row0.best_cost = best_cost;
    run.trace.push_back(row0);

    // the proposal engines search (a, b) concatenated over this box
    const Bounds weight_box(Vec(static_cast<std::size_t>(2 * n), kWeightFloor),
                            Vec(static_cast<std::size_t>(2 * n), 1.0));
    auto split_point = [&](const Vec& point) {
        Eigen::VectorXd pa(n), pb(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            pa(i) = point[static_cast<std::size_t>(i)];
            pb(i) = point[static_cast<std::size_t>(n + i)];
        }
        return std::make_pair(project_weights(std::move(pa)), project_weights(std::move(pb)));
    };

    // candidate weights are scored on the reduced objective: the filter is
    // re-solved from the candidate's own pencil, so a proposal's value does
    // not depend on the stale incumbent w
    const Objective reduced{static_cast<std::size_t>(2 * n), weight_box,
                            [&](const Vec& point) {
                                auto [pa, pb] = split_point(point);
                                Eigen::VectorXd cw =
                                    gev_power(weighted_numerator(data, pa, config.target_class),
                                              weighted_denominator(data, pb), 1,
                                              config.gev_iterations)
                                        .vectors.col(0);
                                double cost = cost_from_forms(
                                    pa, pb, trial_forms(data, cw, config.target_class));
                                ++evaluations;
                                return cost;
                            },
                            {}};

    // the metaheuristic initializer persists across rounds, so its cluster
    // memory keeps accumulating over the whole run; it is stepped in slices
    // of proposal_evaluations per outer round
    std::optional<OeoEngine> inner_engine;

    // Adam state persists across rounds so the per-coordinate second moments
    // can separate trials; it resets whenever the incumbent jumps to a
    // proposal or restart point
    AdamState adam(2 * n);
    auto reset_adam = [&]() {
        adam = AdamState(2 * n);
        adam.learning_rate = config.learning_rate;
        adam.momentum1 = config.momentum1;
        adam.momentum2 = config.momentum2;
    };
    reset_adam();

    int outer = 0;
    while (outer < config.max_outer && evaluations < config.max_evaluations) {
        ++outer;
        const Eigen::VectorXd a_before = a;

        // (1) proposal phase
        const long remaining = config.max_evaluations - evaluations;
        if (config.proposer == HybridConfig::Proposer::random_restart) {
            Eigen::VectorXd ca = draw_weights();
            Eigen::VectorXd cb = draw_weights();
            double cost = eval_weights(ca, cb);
            track_best(ca, cb, cost);
            a = std::move(ca);  // unconditional restart
            b = std::move(cb);
            current_cost = cost;
            reset_adam();
        } else if (config.proposer == HybridConfig::Proposer::pso) {
            const long proposal_budget = std::min<long>(config.proposal_evaluations, remaining);
            if (proposal_budget >= config.pso.swarm_size) {
                PsoConfig pc = config.pso;
                pc.max_evaluations = proposal_budget;
                RunResult proposal = pso_run(pc, reduced, rng, seed);
                auto [pa, pb] = split_point(proposal.best.point);
                if (proposal.best.cost < current_cost) {  // keep only on improvement
                    a = std::move(pa);
                    b = std::move(pb);
                    current_cost = proposal.best.cost;
                    w = gev_power(weighted_numerator(data, a, config.target_class),
                                  weighted_denominator(data, b), 1, config.gev_iterations)
                            .vectors.col(0);
                    forms = trial_forms(data, w, config.target_class);
                    reset_adam();
                }
                track_best(a, b, current_cost);
            }
        } else {
            if (!inner_engine && remaining >= config.oeo.n_clusters_init) {
                OeoConfig oc = config.proposer == HybridConfig::Proposer::moeo
                                   ? OeoConfig::modified()
                                   : config.oeo;
                oc.mode =
                    config.proposer == HybridConfig::Proposer::moeo ? Mode::moeo : Mode::oeo;
                oc.max_evaluations = config.max_evaluations;
                inner_engine.emplace(oc, reduced, rng);
            }
            if (inner_engine) {
                for (long i = 0; i < config.proposal_evaluations &&
                                 evaluations < config.max_evaluations;
                     ++i) {
                    inner_engine->step();
                    if (inner_engine->state().iteration %
                            inner_engine->config().prune_period ==
                        0)
                        inner_engine->prune();
                }
                const Solution& inner_best = inner_engine->state().best;
                if (inner_best.cost < current_cost) {  // keep only on improvement
                    auto [pa, pb] = split_point(inner_best.point);
                    a = std::move(pa);
                    b = std::move(pb);
                    current_cost = inner_best.cost;
                    w = gev_power(weighted_numerator(data, a, config.target_class),
                                  weighted_denominator(data, b), 1, config.gev_iterations)
                            .vectors.col(0);
                    forms = trial_forms(data, w, config.target_class);
                    reset_adam();
                }
                track_best(a, b, current_cost);
            }
        }

        // (2) short Adam descent on (a, b) under projection
        for (int step = 0; step < config.gd_steps && evaluations < config.max_evaluations;
             ++step) {
            const double num = a.dot(forms.numerator);
            const double den = b.dot(forms.denominator);
            if (den < kDenominatorFloor) throw std::runtime_error("wgtcsp: denominator collapsed");
            Eigen::VectorXd grad(2 * n);
            grad.head(n) = -forms.numerator / den;
            grad.tail(n) = num * forms.denominator / (den * den);
            grad = sanitize_gradient(std::move(grad));
            Eigen::VectorXd params(2 * n);
            params.head(n) = a;
            params.tail(n) = b;
            params = adam_step(params, grad, adam);
            a = project_weights(params.head(n));
            b = project_weights(params.tail(n));
            current_cost = eval_weights(a, b);
            track_best(a, b, current_cost);
        }

        // (3) refresh the filter from the weighted pencil
        w = gev_power(weighted_numerator(data, a, config.target_class),
                      weighted_denominator(data, b), 1, config.gev_iterations)
                .vectors.col(0);
        forms = trial_forms(data, w, config.target_class);
        if (evaluations < config.max_evaluations) {
            current_cost = eval_weights(a, b);
            track_best(a, b, current_cost);
        }

        TraceRow row;
        row.iteration = outer;
        row.evaluations = evaluations;
        row.best_cost = best_cost;
        run.trace.push_back(row);

        if ((a - a_before).cwiseAbs().sum() < config.gamma_stop) break;
    }

    run.best.point.assign(static_cast<std::size_t>(2 * n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        run.best.point[static_cast<std::size_t>(i)] = best_a(i);
        run.best.point[static_cast<std::size_t>(n + i)] = best_b(i);
    }
    run.best.cost = best_cost;
    return HybridResult{std::move(run), std::move(best_a), std::move(best_b), std::move(best_w)};
}

}  // namespace oeo
