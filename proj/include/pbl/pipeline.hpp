#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbl/config.hpp"
#include "pbl/front.hpp"
#include "pbl/layers.hpp"
#include "pbl/norms.hpp"
#include "pbl/prandtl_zero.hpp"
#include "pbl/residual.hpp"

namespace pbl {

enum ExitCode : int { kAllPass = 0, kCriterionFailure = 1, kPipelineError = 2, kConfigError = 3 };

/// A module error tagged with the stage that raised it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage(std::move(stage)) {}
    std::string stage;
};

/// One acceptance criterion. status is pass, fail, error or skipped.
struct Criterion {
    int id = 0;
    std::string name;
    std::string status = "skipped";
    std::vector<Flag> checks;
    json metrics = json::object();
    double runtime = 0.0;

    void check(std::string what, bool ok, std::string detail = {});
    json to_json() const;
};

/// Everything a run computes, held in memory until the artifacts are written.
struct RunOutput {
    RunConfig config;
    bool degenerate = false;
    FrontProfile front;
    Prandtl0Solution p0;
    LayerSet layers;
    CompositeFlow flow;
    RemainderFields remainder;
    json report = json::object();   // deterministic given (config, seed)
    json timings = json::object();  // seconds per stage
};

GridPtr physical_grid(const RunConfig& c);

/// Front, leading layer and the Euler/Prandtl ladder up to the cutoff.
LayerSet expansion(const RunConfig& c, FrontProfile* front = nullptr, Prandtl0Solution* p0 = nullptr);

/// All stages through the remainder and the reports. Throws StageError.
RunOutput run_stages(const RunConfig& c);

/// Evaluate the acceptance criteria; companion runs are skipped when
/// config.companions is false. Never throws: failures inside a criterion
/// become status "error".
std::vector<Criterion> evaluate_criteria(const RunOutput& out);

int exit_code(const std::vector<Criterion>& verdict);

/// Stages, criteria and artifacts under config.output_dir. Module errors are
/// written to failure.json and give kPipelineError.
int run(const RunConfig& c);

/// Parallel pipelines over `values` of epsilon (>= 3 values) or delta (>= 2).
/// Members that fail are recorded and the sweep continues.
json sweep(const RunConfig& base, const std::string& vary, const std::vector<double>& values);
int sweep_command(const RunConfig& base, const std::string& vary, const std::vector<double>& values);

/// Per-figure CSVs under <run_dir>/plots: decay curves of every stored field,
/// residual maps and the fitted slopes.
void export_plots(const std::filesystem::path& run_dir);

}  // namespace pbl
