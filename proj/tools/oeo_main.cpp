#include <CLI11.hpp>
#include <iostream>

#include "oeo/benchmarks.hpp"
#include "oeo/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"observer-effect optimization experiment harness"};
    app.require_subcommand(1);

    std::string config_path, output_override, summarize_dir;
    auto* run = app.add_subcommand("run", "run a seeded experiment from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--output", output_override, "override the config's output directory");

    auto* sum = app.add_subcommand("summarize", "rebuild the summary from an output directory");
    sum->add_option("dir", summarize_dir, "experiment output directory")->required();

    auto* bench = app.add_subcommand("bench-list", "list the built-in benchmark objectives");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto rows = oeo::run_experiment_file(config_path, output_override);
            std::cout << oeo::summary_csv(rows);
            return 0;
        }
        if (sum->parsed()) {
            std::cout << oeo::summary_csv(oeo::summarize(summarize_dir));
            return 0;
        }
        if (bench->parsed()) {
            std::cout << "name,default_dims,lower,upper,optimum_value\n";
            for (auto name : oeo::benchmark_registry()) {
                auto spec = oeo::make_benchmark(name, 5);
                std::cout << oeo::to_string(name) << ',' << spec.dims << ','
                          << spec.bounds.lower[0] << ',' << spec.bounds.upper[0] << ','
                          << spec.optimum_value << '\n';
            }
            std::cout << "gaussian,configurable,0,1,instance-specific\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
