// Runs the default configuration with every companion study and prints one
// line per acceptance criterion. Exit status is nonzero when any criterion fails.
#include <chrono>
#include <cstdio>

#include "pbl/parallel.hpp"
#include "pbl/pipeline.hpp"

int main() {
    using namespace pbl;
    thread_cap();
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_config({}, {});
    std::vector<Criterion> verdict;
    try {
        verdict = evaluate_criteria(run_stages(cfg));
    } catch (const std::exception& e) {
        std::printf("FAIL pipeline: %s\n", e.what());
        return 2;
    }
    for (const auto& c : verdict) {
        std::string upper = c.status;
        for (char& ch : upper) ch = char(std::toupper(ch));
        std::printf("%-7s criterion %2d  %-44s %7.2fs\n", upper.c_str(), c.id, c.name.c_str(), c.runtime);
        if (c.status == "pass" || c.status == "skipped") continue;
        for (const auto& f : c.checks)
            if (!f.pass) std::printf("          %s: %s\n", f.check.c_str(), f.detail.c_str());
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int code = exit_code(verdict);
    std::printf("exit %d after %.1fs\n", code, total);
    return code;
}
