#pragma once

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbl/layers.hpp"
#include "pbl/norms.hpp"

namespace pbl {

/// The composite expansion in Prandtl variables. uE includes the free stream 1;
/// vE = sum eps^{(j-1)/2} v^j_e. Ps = PPa - UE - (UE^2 + eps VE^2)/2 with UE = uE - 1,
/// i.e. the Bernoulli pressure of the Euler part plus the auxiliary pressures.
struct CompositeFlow {
    Field2D us, vs, Ps;
    Field2D uP, uE, uPn1;  // u^P_R, u^E_R, u^{P,n-1}_R
    Field2D vP, vE;
    double epsilon = 0.0;
    int n = 0;
    std::vector<std::string> warnings;
};

CompositeFlow compose(const LayerSet& L);

/// Navier-Stokes residuals of (us, vs, Ps) by FD, the scaled Laplacian being
/// eps d_xx + d_yy in Prandtl variables.
Field2D ns_residual_u(const Field2D& us, const Field2D& vs, const Field2D& Ps, double epsilon);
Field2D ns_residual_v(const Field2D& us, const Field2D& vs, const Field2D& Ps, double epsilon);

struct TwoGridCheck {
    std::vector<double> x, fine, difference;  // column L2 of R and of R_fine - R_coarse
    int stations = 0;
    int valid = 0;
    bool pass = false;
};

/// Ru, Rv: structural residuals of the full expansion (Euler-only terms
/// cancelled analytically) with the discrete layer defects removed.
/// Ru_direct, Rv_direct: the same residuals evaluated on the composite fields.
struct RemainderFields {
    Field2D Ru, Rv, Ru_direct, Rv_direct;
    double epsilon = 0.0;
    int n = 0;
    double gamma = 0.0;
    TwoGridCheck two_grid;
};

class RefinementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RemainderOptions {
    bool two_grid = true;
    double factor = 4.0;   // R must exceed factor * |R_fine - R_coarse|
    int min_valid = 8;
    double x_lo = 10.0, x_hi = 1000.0;
};

/// Every stored field restricted by `stride`, with defects, coefficients and the
/// cutoff error recomputed on the coarse grid.
LayerSet restrict_layers(const LayerSet& L, int stride);

/// The defect-corrected structural remainder of L on its own grid.
Field2D structural_remainder(const LayerSet& L);

RemainderFields remainder(const CompositeFlow& flow, const LayerSet& L, const RemainderOptions& opt = {});

/// C(eps) = sup over the window of x^rate * g(x); the eps-exponent is the slope of
/// log C against log eps.
double weighted_window_sup(std::span<const double> x, std::span<const double> g, double rate, double x_lo = 10.0,
                           double x_hi = 1000.0);

struct ScalingMember {
    double epsilon = 0.0;
    bool ok = false;
    std::string error;
    std::vector<double> x;
    std::vector<double> remainder_l2;  // eps^{-n/2-gamma} ||sqrt(eps) Ru||_{L2y}
    std::vector<double> cutoff_l2;     // ||E^(n)||_{L2y}
    NormReport report;                 // per-member slopes
};

struct ScalingOptions {
    int n = 1;
    double gamma = 0.0;
    double kappa = 0.05;
    double sigma_n = 1e-4;
    double p_remainder_min = 0.15;
    double p_cutoff_min = 0.20;
    double remainder_slope_slack = 0.15;
    double cutoff_slope_slack = 0.10;
};

/// Exponents p in eps^p of the remainder quantity and of the cutoff error.
/// Members that failed are skipped; with fewer than two usable members the fit
/// is reported as degenerate.
NormReport epsilon_exponents(const std::vector<ScalingMember>& members, const ScalingOptions& opt);

ScalingMember scaling_member(const LayerSet& L, const ScalingOptions& opt, const RemainderOptions& ropt = {});

/// Rebuild the pipeline at each eps (in parallel), isolate failures, fit the exponents.
NormReport scaling_study(const std::function<LayerSet(double)>& factory, const std::vector<double>& eps_list,
                         const ScalingOptions& opt, std::vector<ScalingMember>* members = nullptr,
                         const RemainderOptions& ropt = {});

/// Profile bounds on the split composite: each bounded weighted sup becomes a
/// slope assertion (slope <= 0.1 over [10, 1000]). Derivative orders k, j and
/// weights m run up to 2.
NormReport profile_bounds(const CompositeFlow& flow, const LayerSet& L);

/// Window sups of the quantities bounded by O(delta), keyed by name.
std::map<std::string, double> delta_tagged(const CompositeFlow& flow, const LayerSet& L);

/// Shrink factors big/small for every tagged quantity present in both runs;
/// pass when the factor lies in [lo, hi]. `assert_prefixes` selects the
/// quantities whose flags count; the others are reported only.
NormReport delta_linearity(const std::map<std::string, double>& big, const std::map<std::string, double>& small,
                           const std::vector<std::string>& assert_prefixes, double lo = 1.5, double hi = 3.0);

}  // namespace pbl
