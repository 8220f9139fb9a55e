// Command-line harness: simulate a scenario, validate a scenario document, or
// print the capacity a workload needs.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "wfsim/errors.hpp"
#include "wfsim/metrics.hpp"
#include "wfsim/report.hpp"
#include "wfsim/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for workflow scheduling on a batch cluster"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write CSV exports plus summary.txt");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--seed", seed, "Override the scenario seed");

    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario document");
    validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    auto* capacity = app.add_subcommand("capacity", "Print the steady-state core demand of a scenario's load");
    capacity->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : wfsim::exit_error;
    }

    try {
        wfsim::ScenarioConfig config = wfsim::load_scenario_file(scenario_path);
        if (*validate) {
            std::cout << "ok: " << config.name << " (" << config.load.workflow->steps.size() << " steps, "
                      << config.load.batch_count * config.load.batch_size << " submissions)\n";
            return 0;
        }
        if (*capacity) {
            const double mc = wfsim::required_core_capacity(*config.load.workflow, config.arrival_rate(),
                                                            config.bind_delay_seconds);
            std::printf("%.0f\n", mc);
            return 0;
        }
        if (seed) config.seed = *seed;
        const int code = wfsim::run_scenario(config, out_dir);
        std::cout << "wrote " << out_dir << " (exit " << code << ")\n";
        return code;
    } catch (const wfsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wfsim::exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wfsim::exit_error;
    }
}
