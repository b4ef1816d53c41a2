#include "oeo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "oeo/baselines.hpp"
#include "oeo/benchmarks.hpp"
#include "oeo/wgtcsp.hpp"

namespace oeo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(s)) {
        auto colon = item.find(':');
        if (colon == std::string::npos) {
            seeds.push_back(std::stoull(item));
        } else {
            auto lo = std::stoull(item.substr(0, colon));
            auto hi = std::stoull(item.substr(colon + 1));
            if (hi < lo) throw std::invalid_argument("config: seed range hi < lo");
            for (auto v = lo; v <= hi; ++v) seeds.push_back(v);
        }
    }
    return seeds;
}

class SectionReader {
public:
    SectionReader(const ExperimentConfig& cfg, const std::string& name) {
        auto it = cfg.sections.find(name);
        if (it != cfg.sections.end()) kv_ = &it->second;
    }
    bool has(const std::string& key) const { return kv_ && kv_->count(key); }
    std::string str(const std::string& key, const std::string& fallback) const {
        return has(key) ? kv_->at(key) : fallback;
    }
    double num(const std::string& key, double fallback) const {
        return has(key) ? std::stod(kv_->at(key)) : fallback;
    }
    long integer(const std::string& key, long fallback) const {
        return has(key) ? std::stol(kv_->at(key)) : fallback;
    }
    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = kv_->at(key);
        return v == "true" || v == "1" || v == "yes";
    }

private:
    const std::map<std::string, std::string>* kv_ = nullptr;
};

OeoConfig oeo_config_from(const ExperimentConfig& cfg, bool modified, long max_evaluations) {
    OeoConfig oc = modified ? OeoConfig::modified() : OeoConfig::simple();
    SectionReader sec(cfg, modified ? "moeo" : "oeo");
    oc.n_clusters_init = static_cast<int>(sec.integer("n_clusters_init", oc.n_clusters_init));
    oc.a_start = sec.num("a_start", oc.a_start);
    oc.b_start = sec.num("b_start", oc.b_start);
    oc.g_start = sec.num("g_start", oc.g_start);
    oc.m1 = sec.num("m1", oc.m1);
    oc.m2 = sec.num("m2", oc.m2);
    oc.step_scale = sec.num("step_scale", oc.step_scale);
    oc.delta_a = sec.num("delta_a", oc.delta_a);
    oc.delta_g = sec.num("delta_g", oc.delta_g);
    oc.min_members_for_rule =
        static_cast<int>(sec.integer("min_members_for_rule", oc.min_members_for_rule));
    oc.prune_period = static_cast<int>(sec.integer("prune_period", oc.prune_period));
    oc.per_cluster_cap = static_cast<int>(sec.integer("per_cluster_cap", oc.per_cluster_cap));
    if (sec.has("update_method"))
        oc.update_method.tag = update_tag_from_string(sec.str("update_method", ""));
    if (sec.has("effectiveness_metric"))
        oc.effectiveness_metric.tag = metric_tag_from_string(sec.str("effectiveness_metric", ""));
    oc.update_method.p = sec.num("update_p", oc.update_method.p);
    oc.update_method.elite_count =
        static_cast<int>(sec.integer("elite_count", oc.update_method.elite_count));
    oc.effectiveness_metric.elite_count = oc.update_method.elite_count;
    oc.lambda = sec.num("lambda", oc.lambda);
    oc.algorithm1_g_branch = sec.flag("algorithm1_g_branch", oc.algorithm1_g_branch);
    oc.max_evaluations = max_evaluations;
    return oc;
}

PsoConfig pso_config_from(const ExperimentConfig& cfg, long max_evaluations) {
    PsoConfig pc;
    SectionReader sec(cfg, "pso");
    pc.swarm_size = static_cast<int>(sec.integer("swarm_size", pc.swarm_size));
    pc.inertia = sec.num("inertia", pc.inertia);
    pc.c1 = sec.num("c1", pc.c1);
    pc.c2 = sec.num("c2", pc.c2);
    pc.max_evaluations = max_evaluations;
    return pc;
}

BatConfig bat_config_from(const ExperimentConfig& cfg, long max_evaluations) {
    BatConfig bc;
    SectionReader sec(cfg, "bat");
    bc.population = static_cast<int>(sec.integer("population", bc.population));
    bc.freq_min = sec.num("freq_min", bc.freq_min);
    bc.freq_max = sec.num("freq_max", bc.freq_max);
    bc.loudness0 = sec.num("loudness0", bc.loudness0);
    bc.pulse_rate0 = sec.num("pulse_rate0", bc.pulse_rate0);
    bc.alpha = sec.num("alpha", bc.alpha);
    bc.gamma_decay = sec.num("gamma_decay", bc.gamma_decay);
    bc.max_evaluations = max_evaluations;
    return bc;
}

HybridConfig hybrid_config_from(const ExperimentConfig& cfg, HybridConfig::Proposer proposer,
                                long max_evaluations) {
    HybridConfig hc;
    hc.proposer = proposer;
    SectionReader sec(cfg, "hybrid");
    hc.max_evaluations = max_evaluations;
    hc.max_outer = static_cast<int>(sec.integer("max_outer", hc.max_outer));
    hc.gamma_stop = sec.num("gamma_stop", hc.gamma_stop);
    hc.gd_steps = static_cast<int>(sec.integer("gd_steps", hc.gd_steps));
    hc.gev_iterations = static_cast<int>(sec.integer("gev_iterations", hc.gev_iterations));
    hc.proposal_evaluations =
        static_cast<int>(sec.integer("proposal_evaluations", hc.proposal_evaluations));
    hc.target_class = static_cast<int>(sec.integer("target_class", hc.target_class));
    hc.learning_rate = sec.num("learning_rate", hc.learning_rate);
    hc.momentum1 = sec.num("momentum1", hc.momentum1);
    hc.momentum2 = sec.num("momentum2", hc.momentum2);
    hc.oeo = oeo_config_from(cfg, false, hc.proposal_evaluations);
    hc.pso = pso_config_from(cfg, hc.proposal_evaluations);
    hc.pso.swarm_size = std::min(hc.pso.swarm_size,
                                 std::max(2, hc.proposal_evaluations / 2));
    return hc;
}

bool is_hybrid(const std::string& algorithm) {
    return algorithm == "gd" || algorithm == "oeo-gd" || algorithm == "moeo-gd" ||
           algorithm == "pso-gd";
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string csv_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

void ExperimentConfig::validate() const {
    if (algorithms.empty()) throw std::invalid_argument("config: at least one algorithm");
    static const std::set<std::string> known = {"oeo",  "moeo",   "pso",     "bat",
                                                "gd",   "oeo-gd", "moeo-gd", "pso-gd"};
    for (const auto& a : algorithms) {
        if (!known.count(a)) throw std::invalid_argument("config: unknown algorithm " + a);
    }
    if (seeds.empty()) throw std::invalid_argument("config: at least one seed");
    if (max_evaluations < 1) throw std::invalid_argument("config: max_evaluations >= 1");
    if (output_dir.empty()) throw std::invalid_argument("config: output directory required");
    if (objective.empty()) throw std::invalid_argument("config: objective required");
    const bool trial_objective = objective == "trialset";
    for (const auto& a : algorithms) {
        if (is_hybrid(a) != trial_objective)
            throw std::invalid_argument(
                "config: hybrid algorithms pair with objective=trialset, others with benchmarks");
    }
    if (!trial_objective) benchmark_name_from_string(objective);  // throws on unknown tag
}

ExperimentConfig parse_experiment_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section = "experiment";
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key or value");
        cfg.sections[section][key] = value;
    }

    SectionReader exp(cfg, "experiment");
    if (!exp.has("algorithm")) throw std::invalid_argument("config: experiment.algorithm required");
    cfg.algorithms = split_list(exp.str("algorithm", ""));
    cfg.objective = exp.str("objective", "");
    cfg.dims = static_cast<std::size_t>(exp.integer("dims", 5));
    if (!exp.has("seeds")) throw std::invalid_argument("config: experiment.seeds required");
    cfg.seeds = parse_seeds(exp.str("seeds", ""));
    cfg.max_evaluations = exp.integer("max_evaluations", 0);
    cfg.output_dir = exp.str("output", "");
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config_text(buf.str());
}

std::string trace_csv(const RunResult& result) {
    std::ostringstream out;
    out << "iteration,evaluations,best_cost,A,B,G_mean,clusters\n";
    for (const auto& row : result.trace) {
        out << row.iteration << ',' << row.evaluations << ',' << fmt(row.best_cost) << ','
            << csv_opt(row.a) << ',' << csv_opt(row.b) << ',' << csv_opt(row.g_mean) << ','
            << (row.cluster_count ? std::to_string(*row.cluster_count) : "") << '\n';
    }
    return out.str();
}

std::vector<SummaryRow> run_experiment(const ExperimentConfig& config,
                                       const std::string& config_text) {
    config.validate();
    fs::create_directories(config.output_dir);

    // resolve the objective once so every algorithm sees the same instance
    std::optional<LandscapeSpec> landscape;
    std::optional<TrialSet> trials;
    std::string objective_label = config.objective;
    if (config.objective == "trialset") {
        SectionReader sec(config, "trialset");
        if (sec.has("file")) {
            trials = load_trialset(sec.str("file", ""));
        } else {
            std::optional<std::size_t> outlier;
            if (sec.has("outlier_trial"))
                outlier = static_cast<std::size_t>(sec.integer("outlier_trial", 0));
            trials = make_synthetic_trialset(
                static_cast<std::size_t>(sec.integer("n", 10)),
                static_cast<int>(sec.integer("channels", 4)),
                static_cast<std::uint64_t>(sec.integer("seed", 1)), outlier,
                sec.num("outlier_scale", 100.0), sec.num("noise_scale", 0.1));
        }
    } else if (config.objective == "gaussian") {
        SectionReader sec(config, "landscape");
        landscape = gaussian_landscape(config.dims,
                                       static_cast<std::size_t>(sec.integer("n_dense", 8)),
                                       static_cast<std::size_t>(sec.integer("n_sparse", 4)),
                                       static_cast<std::uint64_t>(sec.integer("seed", 1)));
        objective_label += "_s" + std::to_string(landscape->seed);
    } else {
        landscape = make_benchmark(benchmark_name_from_string(config.objective), config.dims);
    }

    std::ostringstream manifest;
    manifest << json{{"type", "experiment"},
                     {"config_text", config_text},
                     {"objective", objective_label}}
                    .dump()
             << '\n';

    std::vector<SummaryRow> summary;
    for (const auto& algorithm : config.algorithms) {
        SummaryRow row;
        row.algorithm = algorithm;
        row.objective = objective_label;
        double sum = 0.0, sq_sum = 0.0, wall_sum = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (auto seed : config.seeds) {
            auto t0 = std::chrono::steady_clock::now();
            RunResult result;
            if (algorithm == "oeo" || algorithm == "moeo") {
                auto oc = oeo_config_from(config, algorithm == "moeo", config.max_evaluations);
                result = run_oeo(oc, to_objective(*landscape), seed);
            } else if (algorithm == "pso") {
                result = pso_run(pso_config_from(config, config.max_evaluations),
                                 to_objective(*landscape), seed);
            } else if (algorithm == "bat") {
                result = bat_run(bat_config_from(config, config.max_evaluations),
                                 to_objective(*landscape), seed);
            } else {
                HybridConfig::Proposer proposer = HybridConfig::Proposer::random_restart;
                if (algorithm == "oeo-gd") proposer = HybridConfig::Proposer::oeo;
                if (algorithm == "moeo-gd") proposer = HybridConfig::Proposer::moeo;
                if (algorithm == "pso-gd") proposer = HybridConfig::Proposer::pso;
                auto hc = hybrid_config_from(config, proposer, config.max_evaluations);
                result = oeo_gd_run(hc, *trials, seed).run;
            }
            auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            std::string trace_name = algorithm + "_seed" + std::to_string(seed) + ".csv";
            write_atomic(fs::path(config.output_dir) / trace_name, trace_csv(result));

            json cfg_snapshot = json::object();
            for (const auto& [k, v] : result.config) cfg_snapshot[k] = v;
            manifest << json{{"algorithm", algorithm}, {"objective", objective_label},
                             {"seed", seed},           {"trace", trace_name},
                             {"final_cost", result.best.cost},
                             {"wall_seconds", wall},   {"config", cfg_snapshot}}
                            .dump()
                     << '\n';

            sum += result.best.cost;
            sq_sum += result.best.cost * result.best.cost;
            wall_sum += wall;
            best = std::min(best, result.best.cost);
        }
        const double n = static_cast<double>(config.seeds.size());
        row.runs = static_cast<int>(config.seeds.size());
        row.cost_mean = sum / n;
        row.cost_std = std::sqrt(std::max(0.0, sq_sum / n - row.cost_mean * row.cost_mean));
        row.best_cost = best;
        row.mean_wall_seconds = wall_sum / n;
        summary.push_back(std::move(row));
    }

    write_atomic(fs::path(config.output_dir) / "manifest.jsonl", manifest.str());
    write_atomic(fs::path(config.output_dir) / "summary.csv", summary_csv(summary));
    return summary;
}

std::vector<SummaryRow> run_experiment_file(const std::string& config_path,
                                            const std::string& output_override) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("config: cannot open " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto text = buf.str();
    auto cfg = parse_experiment_config_text(text);
    if (!output_override.empty()) cfg.output_dir = output_override;
    return run_experiment(cfg, text);
}

std::vector<SummaryRow> summarize(const std::string& directory) {
    fs::path dir(directory);
    std::ifstream manifest(dir / "manifest.jsonl");
    if (!manifest) throw std::runtime_error("summarize: no manifest.jsonl in " + directory);

    struct Group {
        std::vector<double> finals;
        double wall_sum = 0.0;
    };
    std::map<std::pair<std::string, std::string>, Group> groups;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        json entry = json::parse(line);
        if (!entry.contains("trace")) continue;  // header line
        std::ifstream trace(dir / entry["trace"].get<std::string>());
        if (!trace) throw std::runtime_error("summarize: missing trace " +
                                             entry["trace"].get<std::string>());
        std::string trace_line, last;
        std::getline(trace, trace_line);  // header
        if (trace_line != "iteration,evaluations,best_cost,A,B,G_mean,clusters")
            throw std::runtime_error("summarize: malformed trace header");
        while (std::getline(trace, trace_line)) {
            if (!trace_line.empty()) last = trace_line;
        }
        if (last.empty()) throw std::runtime_error("summarize: empty trace");
        auto first = last.find(',');
        auto second = last.find(',', first + 1);
        auto third = last.find(',', second + 1);
        double final_cost = std::stod(last.substr(second + 1, third - second - 1));

        auto key = std::make_pair(entry["algorithm"].get<std::string>(),
                                  entry["objective"].get<std::string>());
        groups[key].finals.push_back(final_cost);
        groups[key].wall_sum += entry.value("wall_seconds", 0.0);
    }

    std::vector<SummaryRow> rows;
    for (const auto& [key, group] : groups) {
        SummaryRow row;
        row.algorithm = key.first;
        row.objective = key.second;
        row.runs = static_cast<int>(group.finals.size());
        double sum = 0.0, sq = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (double f : group.finals) {
            sum += f;
            sq += f * f;
            best = std::min(best, f);
        }
        const double n = static_cast<double>(group.finals.size());
        row.cost_mean = sum / n;
        row.cost_std = std::sqrt(std::max(0.0, sq / n - row.cost_mean * row.cost_mean));
        row.best_cost = best;
        row.mean_wall_seconds = group.wall_sum / n;
        rows.push_back(std::move(row));
    }
    return rows;  // std::map ordering makes this independent of file order
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "algorithm,objective,runs,cost_mean,cost_std,best_cost,mean_wall_seconds\n";
    for (const auto& r : rows) {
        out << r.algorithm << ',' << r.objective << ',' << r.runs << ',' << fmt(r.cost_mean) << ','
            << fmt(r.cost_std) << ',' << fmt(r.best_cost) << ',' << fmt(r.mean_wall_seconds)
            << '\n';
    }
    return out.str();
}

}  // namespace oeo
