#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbl/io.hpp"

namespace pbl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Verdict thresholds; defaults are the acceptance values.
struct VerdictTolerances {
    double front_residual = 1e-8;
    double front_bc = 1e-8;
    double front_runtime = 1.0;
    double march_factor = 1.8;
    double march_runtime = 30.0;
    double v0_slope_tol = 0.05;
    double v0x_slope_tol = 0.10;
    double kernel_tol = 1e-6;
    int kernel_samples = 1000;
    double kernel_runtime = 5.0;
    double euler_slope_tol = 0.05;
    double euler_x_slope_tol = 0.10;
    double order_slack = 0.5;  // observed order must reach stencil order minus this
    double v1_slope_tol = 0.07;
    double mms_factor = 1.8;
    double cutoff_slope_slack = 0.10;
    double cutoff_eps_exponent = 0.20;
    double remainder_eps_exponent = 0.15;
    double remainder_slope_slack = 0.15;
    double sweep_runtime = 600.0;
    double hardy_slack = 1e-3;
    int hardy_samples = 500;
    double norm_rel_tol = 0.01;
    double delta_shrink_lo = 1.5;
    double delta_shrink_hi = 3.0;
};

struct RunConfig {
    double epsilon = 1e-3;
    double delta = 0.05;
    int n = 1;
    double gamma = 0.0;
    double kappa = 0.05;

    double x_max = 2000.0;
    int nx = 512;
    double y_max = 2500.0;
    int ny = 256;
    std::string stretch = "geometric(1.03)";
    int stencil_order = 2;

    double newton_tol = 1e-12;
    double bc_tol = 1e-8;
    double tail_tol = 1e-3;
    double mp_tol = 1e-10;
    double interp_tol = 1e-8;
    double quad_tol = 1e-7;

    std::string U0_spec = "gaussian_decay";
    std::string Ui_spec = "gaussian";
    std::string output_dir = "out";
    std::uint64_t seed = 20240611;

    bool eps_gate = true;    // enforce eps <= delta^2
    bool two_grid = true;    // gate the remainder on the two-grid check
    bool companions = true;  // evaluate the criteria that need extra runs
    std::vector<double> sweep_epsilons = {1e-2, 3e-3, 1e-3};
    double delta_half = 0.025;

    VerdictTolerances verdict;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(VerdictTolerances, front_residual, front_bc, front_runtime,
                                                march_factor, march_runtime, v0_slope_tol, v0x_slope_tol, kernel_tol,
                                                kernel_samples, kernel_runtime, euler_slope_tol, euler_x_slope_tol,
                                                order_slack, v1_slope_tol, mms_factor, cutoff_slope_slack,
                                                cutoff_eps_exponent, remainder_eps_exponent, remainder_slope_slack,
                                                sweep_runtime, hardy_slack, hardy_samples, norm_rel_tol,
                                                delta_shrink_lo, delta_shrink_hi)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, epsilon, delta, n, gamma, kappa, x_max, nx, y_max, ny,
                                                stretch, stencil_order, newton_tol, bc_tol, tail_tol, mp_tol,
                                                interp_tol, quad_tol, U0_spec, Ui_spec, output_dir, seed, eps_gate,
                                                two_grid, companions, sweep_epsilons, delta_half, verdict)

/// Throws ConfigError naming the first violated constraint.
void validate(const RunConfig& c);

/// Apply `key=value` with dotted keys into nested objects; the value is parsed as
/// JSON and falls back to a string.
void apply_override(json& j, const std::string& assignment);

/// Defaults, then the file (if non-empty), then the overrides; validated.
RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

}  // namespace pbl
