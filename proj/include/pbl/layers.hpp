#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pbl/euler.hpp"
#include "pbl/grid.hpp"
#include "pbl/norms.hpp"
#include "pbl/prandtl_zero.hpp"

namespace pbl {

/// Every layer of the expansion, indexed by i = 0..n. Euler fields are kept in
/// their own frame and restricted to the physical grid (ue, ve); ppa[i] holds
/// the scaled auxiliary pressure eps^{(i+1)/2} P^{i,a}_p.
struct LayerSet {
    double epsilon = 1e-3;
    double delta = 0.05;
    int n = 1;
    double gamma = 0.0;
    std::vector<double> sigma;
    GridPtr grid;   // physical
    GridPtr egrid;  // Euler

    std::vector<Field2D> up, vp;
    std::vector<EulerLayer> euler;
    std::vector<Field2D> ue, ve;
    std::vector<Field2D> ppa;
    std::vector<Field2D> pae;              // P^{i,a}_e on the Euler grid
    std::vector<double> pae_residual;      // cancellation residual per i
    std::vector<Field2D> forcing;          // f^(i)
    std::vector<Field2D> defect;           // discrete defects D_0..D_n (D_n after the cutoff)
    Field2D up_pre, vp_pre;                // final layer before the cutoff
    Field2D cut_G;                         // x-tail correction of the cutoff
    Field2D cut_error;                     // the cutoff error E^(n)
    std::vector<std::string> warnings;
};

double sigma_i(int i, int n);

/// Partial sums in Prandtl scaling: UP = sum_{j<np} eps^{j/2} u^j_p, UE over Euler
/// layers 1..ne, VE = sum eps^{(j-1)/2} v^j_e, PPa over pressures 1..npa.
struct PartialSums {
    Field2D UP, VP, UE, VE, PPa;
};
PartialSums partial_sums(const LayerSet& L, int np, int ne, int npa);

/// Navier-Stokes residuals of a partial expansion with the purely Eulerian terms
/// removed (they cancel identically by harmonicity, Cauchy-Riemann and the
/// auxiliary Euler pressure).
Field2D structural_ru(const PartialSums& s, double epsilon);
Field2D structural_rv(const PartialSums& s, double epsilon);

/// Homogenizer chi(y) = (1 + y - y^2) e^{-y}: chi(0) = 1, chi'(0) = 0, int chi = 0.
/// k = -1 returns int_0^y chi.
double homogenizer(double y, int k = 0);

/// Linear layer operator L(u, v) = a u_x + A u + B u_y + C (v - v(x,0)) - u_yy.
struct LayerCoefficients {
    Field2D a, A, B, C, F;
    std::vector<double> b;              // u(x, 0)
    std::function<double(double)> U;    // u(1, y)
};

struct LayerSolution {
    Field2D u, v;
};

/// Backward Euler in x, FD in y, with v - v(x,0) = -int_0^y u_x carried as extra
/// unknowns so the system is solved implicitly at every station. final_layer
/// selects v = -int_0^y u_x; otherwise v = int_y^{y_max} u_x.
LayerSolution solve_linear_layer(const LayerCoefficients& c, bool final_layer, double tail_tol);

/// Manufactured solution u = e^{-y}/x, v = (1 - e^{-y})/x^2 for a final layer with
/// smooth variable coefficients; max errors per nx and successive reduction factors.
struct MmsStudy {
    std::vector<int> nx;
    std::vector<double> error_u, error_v, factor_u, factor_v;
};
MmsStudy manufactured_study(const std::vector<int>& nx, double x_max = 100.0, double y_max = 40.0, int ny = 160);

/// FD evaluation of L(u, v) on the grid.
Field2D apply_layer_operator(const LayerCoefficients& c, const Field2D& u, const Field2D& v);

/// Defect of the leading layer in physical variables.
Field2D layer0_defect(const Field2D& u0p, const Field2D& v0p);

/// chi(sqrt(eps) y / sqrt(x)) with its derivatives chi_x, chi_y, chi_yy.
struct CutoffFields {
    Field2D chi, chi_x, chi_y, chi_yy;
};
CutoffFields cutoff_fields(const GridPtr& g, double epsilon);

/// v^n = chi v_p and u^n = chi u_p + G with G = int_x^{x_max} (chi_x u_p + chi_y v_p),
/// which keeps the pair divergence free.
struct CutoffResult {
    Field2D u, v, G, error;
};
CutoffResult cutoff_final_layer(const Field2D& up, const Field2D& vp, const LayerCoefficients& c, double epsilon,
                                double tail_tol);
/// L(u^n, v^n) - f in closed form given the pre-cutoff layer and G.
Field2D cutoff_error(const Field2D& up, const Field2D& vp, const Field2D& G, const LayerCoefficients& c,
                     double epsilon);

/// P = -(u^2 + v^2)/2 for one Cauchy-Riemann pair and the relative residual of
/// grad P + (u u_x + v u_Y, u v_x + v v_Y) over interior nodes with x >= x_lo.
struct Cancellation {
    Field2D P;
    double residual = 0.0;
};
Cancellation aux_pressure_euler(int i, const std::vector<EulerLayer>& euler, double x_lo = 2.0);
Cancellation cancellation_check(const Field2D& u, const Field2D& v, double x_lo = 2.0);

struct LayerOptions {
    int n = 1;
    double epsilon = 1e-3;
    double gamma = 0.0;
    double tail_tol = 1e-3;
    std::string Ui_spec = "gaussian";
    QuadOptions quad;
};

/// Build layers 1..n on top of the leading layer.
LayerSet build_layers(const Prandtl0Solution& p0, const GridPtr& physical, const LayerOptions& opt);

/// Coefficients of layer i from layers 0..i-1, Euler 1..i and pressures 1..i.
LayerCoefficients layer_coefficients(const LayerSet& L, int i);

NormReport layer_report(const LayerSet& L);

}  // namespace pbl
