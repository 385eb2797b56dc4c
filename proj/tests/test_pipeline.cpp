#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pbl/pipeline.hpp"

using namespace pbl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("pbl_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig small(const fs::path& dir) {
    RunConfig c = load_config({}, {"nx=96", "companions=false", "output_dir=\"" + dir.string() + "\""});
    return c;
}

}  // namespace

TEST_CASE("config defaults, overrides and rejections") {
    RunConfig d = load_config({}, {});
    CHECK(d.epsilon == 1e-3);
    CHECK(d.delta == 0.05);
    CHECK(d.stretch == "geometric(1.03)");
    CHECK(d.verdict.march_factor == 1.8);

    RunConfig o = load_config({}, {"n=2", "verdict.order_slack=0.25", "U0_spec=perturbed_sine"});
    CHECK(o.n == 2);
    CHECK(o.verdict.order_slack == 0.25);
    CHECK(o.U0_spec == "perturbed_sine");

    CHECK_THROWS_AS(load_config({}, {"epsilon=0.01"}), ConfigError);  // > delta^2
    CHECK_NOTHROW(load_config({}, {"epsilon=0.01", "eps_gate=false"}));
    CHECK_THROWS_AS(load_config({}, {"bogus=1"}), ConfigError);
    CHECK_THROWS_AS(load_config({}, {"verdict.bogus=1"}), ConfigError);
    CHECK_THROWS_AS(load_config({}, {"gamma=0.25"}), ConfigError);
    CHECK_THROWS_AS(load_config({}, {"kappa=0"}), ConfigError);
    CHECK_THROWS_AS(load_config({}, {"stretch=geometric:1.03"}), ConfigError);
    CHECK_THROWS_AS(load_config({}, {"no_equals_sign"}), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json", {}), ConfigError);

    fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({"delta": 0.08, "verdict": {"mms_factor": 1.9}})";
    RunConfig f = load_config(dir / "c.json", {"delta=0.07"});
    CHECK(f.delta == 0.07);
    CHECK(f.verdict.mms_factor == 1.9);
    CHECK(f.verdict.march_factor == 1.8);
}

TEST_CASE("delta = 0 is the degenerate run") {
    fs::path dir = scratch("degenerate");
    RunConfig c = small(dir);
    c.delta = 0.0;
    c.companions = true;
    CHECK(run(c) == kAllPass);
    json r = json::parse(slurp(dir / "report.json"));
    CHECK(r["status"] == "degenerate");
    json v = json::parse(slurp(dir / "verdict.json"));
    CHECK(v["exit_code"] == 0);
    int skipped = 0;
    for (const auto& k : v["criteria"]) skipped += k["status"] == "skipped";
    CHECK(skipped > 0);
}

TEST_CASE("report.json is byte-identical across repeated runs") {
    fs::path dir = scratch("determinism");
    RunConfig c = small(dir);
    const int first = run(c);
    CHECK((first == kAllPass || first == kCriterionFailure));
    const std::string a = slurp(dir / "report.json");
    CHECK(run(c) == first);
    const std::string b = slurp(dir / "report.json");
    CHECK(a == b);
    CHECK_FALSE(a.empty());
    for (const char* f : {"config.json", "verdict.json", "timings.json", "layers.json", "report.csv",
                          "fields/u0_p.csv", "fields/Ru.csv", "fields/cutoff_error.csv"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    CHECK_FALSE(fs::exists(dir / "failure.json"));

    export_plots(dir);
    CHECK(fs::exists(dir / "plots" / "slopes.csv"));
    CHECK(fs::exists(dir / "plots" / "decay_u0_p.csv"));
    CHECK(fs::exists(dir / "plots" / "residual_map_Ru.csv"));
}

TEST_CASE("a module failure writes failure.json and exits 2") {
    fs::path dir = scratch("failure");
    RunConfig c = small(dir);
    c.U0_spec = "csv:/nonexistent/inflow.csv";
    CHECK(run(c) == kPipelineError);
    json f = json::parse(slurp(dir / "failure.json"));
    CHECK(f["stage"].get<std::string>().size() > 0);
    CHECK(f.contains("error"));
}

TEST_CASE("sweep argument validation") {
    RunConfig c = small(scratch("sweep"));
    CHECK_THROWS(sweep(c, "epsilon", {1e-2, 1e-3}));
    CHECK_THROWS(sweep(c, "delta", {0.05}));
    CHECK_THROWS(sweep(c, "nx", {64, 128, 256}));
}

TEST_CASE("exit codes follow the criterion statuses") {
    Criterion pass{1, "a", "pass"}, fail{2, "b", "fail"}, err{3, "c", "error"}, skip{4, "d", "skipped"};
    CHECK(exit_code({pass, skip}) == kAllPass);
    CHECK(exit_code({pass, fail}) == kCriterionFailure);
    CHECK(exit_code({pass, fail, err}) == kPipelineError);
}
