#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pbl/front.hpp"
#include "pbl/grid.hpp"
#include "pbl/norms.hpp"

namespace pbl {

/// In-flow data for the leading layer. Either a profile U0(y) in physical y, or
/// a profile q(1, eta) given directly in von Mises variables.
struct Inflow {
    std::string name;
    bool in_eta = false;
    std::function<double(double)> profile;
};

/// Builtins: "gaussian_decay" (-delta (1 + y^2) e^{-y^2}), "front_exact"
/// (q(1, eta) = phi*(eta)), "perturbed_sine" (-delta e^{-y} (1 + 0.3 sin y)),
/// or "csv:<path>" with columns y,U0.
Inflow make_inflow(const std::string& spec, double delta, const FrontProfile& front);

struct Prandtl0Solution {
    Field2D q;         // von_mises_eta frame
    Field2D u0p;       // physical_y
    Field2D v0p;       // physical_y
    Field2D w;         // q - phi*(eta / sqrt x), von_mises_eta
    Field2D eta_of_y;  // physical_y
    double delta = 0.0;
    double min_one_plus_u = 1.0;
    int newton_iterations = 0;
    std::vector<std::string> warnings;
};

struct MarchOptions {
    double newton_tol = 1e-12;
    double bc_tol = 1e-8;
    int max_newton = 30;
};

/// The eta grid shares x nodes and uses eta_j = (1 + delta) y_j.
GridPtr eta_grid(const GridPtr& physical, double delta);

/// Backward-Euler / conservative-flux march of q_x = ((1 - delta + q) q_eta)_eta.
Field2D march_q(const Inflow& U0, double delta, const GridPtr& physical, const MarchOptions& opt,
                std::vector<std::string>& warnings, int* newton_iterations = nullptr);

struct VonMisesMap {
    Field2D u0p;
    Field2D eta_of_y;
    double roundtrip_error = 0.0;
};

VonMisesMap von_mises_invert(const Field2D& q, double delta, const GridPtr& physical, double interp_tol,
                             std::vector<std::string>& warnings);

Field2D v0p_from_u0p(const Field2D& u0p, double tail_tol);

Field2D w_field(const Field2D& q, const FrontProfile& front);
NormReport w_report(const Field2D& q, const FrontProfile& front, double sigma0, int k_max, int m_max);

/// Self-similar march: start from q(1, eta) = phi*(eta) and record max|w| at x_end
/// for each nx. factor[k] = error[k-1] / error[k].
struct MarchStudy {
    std::vector<int> nx;
    std::vector<double> error, factor;
    double min_one_plus_u = 1.0;
};
MarchStudy march_convergence(const FrontProfile& front, const std::vector<int>& nx, double x_end = 100.0,
                             double y_max = 400.0, int ny = 256, const MarchOptions& opt = {});

Prandtl0Solution solve_prandtl_zero(const Inflow& U0, double delta, const FrontProfile& front,
                                    const GridPtr& physical, const MarchOptions& opt, double interp_tol,
                                    double tail_tol);

}  // namespace pbl
