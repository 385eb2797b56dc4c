#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pbl/io.hpp"
#include "pbl/norms.hpp"

namespace pbl {

/// Property suites that need no PDE solve.
struct SuiteResult {
    std::string name;
    bool pass = true;
    double runtime = 0.0;  // seconds
    std::vector<Flag> checks;
    json metrics = json::object();

    void check(std::string what, bool ok, std::string detail = {});
    json to_json() const;
};

/// sup over t > 0 of |t^{s+1} p^(k)(t)| with p(t) = 1 / (pi (1 + t^2)), indexed
/// [k][s]. This bounds |x^{s+1} Y^{k-s} d_x^k P_Y(x)| for every x, Y > 0.
/// Frozen from a dense scan over t in [1e-4, 1e4].
inline constexpr std::array<std::array<double, 4>, 4> kKernelBound = {{
    {0.159155, 0.0, 0.0, 0.0},
    {0.159155, 0.206749, 0.0, 0.0},
    {0.174669, 0.241303, 0.463812, 0.0},
    {0.591755, 0.310123, 0.591755, 1.486049},
}};

/// Unit mass at X = 1e6 Y, the semigroup identity through the quadrature engine,
/// and the pointwise bounds on random (x, Y, k, s).
SuiteResult check_kernel(std::uint64_t seed, int samples = 1000, double tol = 1e-6);

/// Hardy ratio on random smooth columns with u(0) = 0.
SuiteResult check_hardy(std::uint64_t seed, int samples = 500, double slack = 1e-3);

/// Front residual, far-field value, wall slope and the linear-in-delta bound.
SuiteResult check_front(const std::vector<double>& deltas = {0.01, 0.02, 0.05}, double residual_tol = 1e-8,
                        double bc_tol = 1e-8, double runtime_limit = 1.0);

/// Homogeneity, degeneracy and dense-oracle checks of the norm evaluators.
SuiteResult check_norms(std::uint64_t seed, double rel_tol = 0.01);

SuiteResult run_suite(const std::string& name, std::uint64_t seed);

}  // namespace pbl
