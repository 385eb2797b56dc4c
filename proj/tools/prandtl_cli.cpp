#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbl/checks.hpp"
#include "pbl/config.hpp"
#include "pbl/parallel.hpp"
#include "pbl/pipeline.hpp"

namespace {

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw pbl::ConfigError("bad value in --values: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    pbl::thread_cap();
    CLI::App app{"Moving-plate boundary-layer expansion: runs, sweeps and property suites"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "full pipeline with the acceptance verdict");
    run->add_option("--config", config_path, "JSON config file (defaults when omitted)");
    run->add_option("--set", overrides, "override key=value (dotted keys allowed)");

    std::string vary, values;
    auto* sweep = app.add_subcommand("sweep", "parallel pipelines over epsilon or delta");
    sweep->add_option("--config", config_path, "JSON config file");
    sweep->add_option("--set", overrides, "override key=value");
    sweep->add_option("--vary", vary, "epsilon or delta")->required();
    sweep->add_option("--values", values, "comma-separated list")->required();

    std::string suite;
    std::uint64_t seed = pbl::RunConfig{}.seed;
    auto* check = app.add_subcommand("check", "property suites without a PDE solve");
    check->add_option("--suite", suite, "kernel, hardy, front or norms")
        ->required()
        ->check(CLI::IsMember({"kernel", "hardy", "front", "norms"}));
    check->add_option("--seed", seed, "seed of the random samples");

    std::string run_dir;
    auto* plots = app.add_subcommand("export-plots", "per-figure CSVs from a finished run");
    plots->add_option("--run", run_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : pbl::kConfigError;
    }

    try {
        if (*run) {
            pbl::RunConfig c = pbl::load_config(config_path, overrides);
            int code = pbl::run(c);
            std::cout << "run finished with exit code " << code << "; artifacts in " << c.output_dir << "\n";
            return code;
        }
        if (*sweep) {
            pbl::RunConfig c = pbl::load_config(config_path, overrides);
            int code = pbl::sweep_command(c, vary, parse_values(values));
            std::cout << "sweep finished with exit code " << code << "; " << c.output_dir << "/sweep.json\n";
            return code;
        }
        if (*check) {
            pbl::SuiteResult r = pbl::run_suite(suite, seed);
            std::cout << r.to_json().dump(2) << "\n";
            return r.pass ? pbl::kAllPass : pbl::kCriterionFailure;
        }
        if (*plots) {
            pbl::export_plots(run_dir);
            std::cout << "plots written to " << run_dir << "/plots\n";
            return pbl::kAllPass;
        }
    } catch (const pbl::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return pbl::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pbl::kPipelineError;
    }
    return pbl::kPipelineError;
}
