#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oeo/engine.hpp"

namespace oeo {

/// Parsed plain-text experiment config: `[section]` headers over `key =
/// value` lines, `#` comments. Section "experiment" drives the run; the
/// other sections override algorithm/objective defaults.
struct ExperimentConfig {
    std::vector<std::string> algorithms;  // oeo moeo pso bat gd oeo-gd moeo-gd pso-gd
    std::string objective;                // benchmark tag, "gaussian" or "trialset"
    std::size_t dims = 5;
    std::vector<std::uint64_t> seeds;
    long max_evaluations = 0;
    std::string output_dir;
    std::map<std::string, std::map<std::string, std::string>> sections;

    void validate() const;
};

struct SummaryRow {
    std::string algorithm;
    std::string objective;
    int runs = 0;
    double cost_mean = 0.0;
    double cost_std = 0.0;  // population standard deviation
    double best_cost = 0.0;
    double mean_wall_seconds = 0.0;
};

ExperimentConfig parse_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config_text(const std::string& text);

/// Runs every (algorithm x seed) combination sequentially, writing one trace
/// CSV per run, a JSON-lines manifest (first line carries the full config
/// text for replay) and summary.csv. Files are written atomically. Returns
/// the summary rows.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& config,
                                       const std::string& config_text);

/// Convenience: parse + run. `output_override`, when non-empty, replaces the
/// config's output directory.
std::vector<SummaryRow> run_experiment_file(const std::string& config_path,
                                            const std::string& output_override = "");

/// Rebuild summary rows from an output directory (manifest + trace files).
std::vector<SummaryRow> summarize(const std::string& directory);

std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Trace CSV serialization (header `iteration,evaluations,best_cost,A,B,G_mean,clusters`).
std::string trace_csv(const RunResult& result);

}  // namespace oeo
