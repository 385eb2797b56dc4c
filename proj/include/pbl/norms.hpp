#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbl/grid.hpp"
#include "pbl/io.hpp"

namespace pbl {

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci95 = 0.0;  // half-width of the 95% interval on the slope
    int n_points = 0;
    bool non_power_law = false;  // full ci95 width above 0.5
};

/// Least squares of log g against log x over samples with x in [x_lo, x_hi].
/// Decay fits use the default minimum of 8 samples; epsilon-exponent fits pass fewer.
DecayFit decay_fit(std::span<const double> x, std::span<const double> g, double x_lo, double x_hi,
                   std::size_t min_points = 8);

struct NormEntry {
    std::string name;
    double value = 0.0;
    std::string weight_spec;
    double x_lo = 1.0, x_hi = 0.0;
};

struct SlopeEntry {
    std::string quantity;
    double x_lo = 10.0, x_hi = 1000.0;
    DecayFit fit;
    std::string target;  // human-readable target, empty when only reported
    std::optional<bool> pass;
};

struct Flag {
    std::string check;
    bool pass = false;
    std::string detail;
};

struct NormReport {
    std::vector<NormEntry> entries;
    std::vector<SlopeEntry> slope_fits;
    std::vector<Flag> flags;

    void add(std::string name, double value, std::string weight = {}, double x_lo = 1.0, double x_hi = 0.0);
    const NormEntry* find(const std::string& name) const;
    double value(const std::string& name) const;
    json slopes_json() const;
    json to_json() const;
    std::string to_csv() const;
};

/// Fit over the window with no target; nullopt when a sample there is not positive.
std::optional<SlopeEntry> fit_entry(std::string quantity, std::span<const double> x, std::span<const double> g,
                                    double x_lo = 10.0, double x_hi = 1000.0);
/// Fit and attach a target: pass when |slope - target| <= tol.
void add_slope_eq(NormReport& r, std::string quantity, std::span<const double> x, std::span<const double> g,
                  double target, double tol);
/// Fit and attach an upper bound: pass when slope <= bound.
void add_slope_le(NormReport& r, std::string quantity, std::span<const double> x, std::span<const double> g,
                  double bound);

/// Per-station column norms used by every decay fit.
std::vector<double> column_sup(const Field2D& f);
std::vector<double> column_l2(const Field2D& f);
std::vector<double> column_weighted_sup(const Field2D& f, const std::function<double(double, double)>& w);

/// ||z^m w||_{Q(sigma0, k)} for w sampled in the von Mises frame (z = eta / sqrt x).
double q_norm(const Field2D& w, double sigma0, int k, int m);
/// Prandtl-layer norm P_k(X1, sigma); m adds the weight z^m with z = y / sqrt x.
double p_norm(const Field2D& u, double sigma, int k, double x1, int m = 0);

struct ZParams {
    std::array<double, 8> N{};  // N[2]..N[7] used
};

/// Cutoffs zeta_3 and rho_k with smooth transitions on the gaps.
double zeta3(double x);
double rho(int k, double x);

NormReport z_norm(const Field2D& u, const Field2D& v, double epsilon, const ZParams& p);

/// ||u/y||_{L2} / ||u_y||_{L2} on a column with u(0) = 0.
double hardy_check(std::span<const double> y, std::span<const double> u, int order = 4);

}  // namespace pbl
