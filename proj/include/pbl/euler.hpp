#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pbl/grid.hpp"
#include "pbl/norms.hpp"

namespace pbl {

/// A boundary trace on the whole line, stored as panels with a cheap local
/// evaluator, plus an optional power-law tail t^{-w} beyond the last panel.
struct TraceFunction {
    struct Panel {
        double a = 0.0, b = 0.0;
        int kind = 0;  // 0: cubic in (t - t0); 1: reflected cubic times blend; 2: generic
        double t0 = 0.0;
        double c[4] = {0, 0, 0, 0};
    };
    std::vector<Panel> panels;
    std::function<double(double)> generic;  // used by kind 2
    double blend_lo = -10.0, blend_hi = -5.0;
    double tail_start = 0.0;   // right end of the panels
    double tail_coeff = 0.0;   // f(t) = tail_coeff (t / tail_start)^{-tail_exponent} for t > tail_start
    double tail_exponent = 0.5;
    double decay_exponent_hint = 0.5;
    std::vector<double> sample_x, sample_f;  // the trace on x >= 1 as given

    /// Quadrature segments: the panels, then the tail in s = log(t / tail_start).
    struct Segment {
        double a = 0.0, b = 0.0;
        bool tail = false;
        int panel = -1;
        double f[4] = {0, 0, 0, 0};  // trace at the Gauss points
    };
    std::vector<Segment> segments;
    double tail_span = 24.0;  // s range covered by tail segments

    double operator()(double t) const;
    double eval_panel(const Panel& p, double t) const;
    /// Build `segments`; called by the factories.
    void prepare();
};

/// Even reflection about x = 1, blended to zero on [-x_ext, -x_ext + smoothing_width];
/// beyond the last sample a power law fitted on the last decade.
TraceFunction extend_trace(std::span<const double> x, std::span<const double> f, double x_ext = 10.0,
                           double smoothing_width = 5.0);
TraceFunction extend_trace(const std::function<double(double)>& trace, std::span<const double> x,
                           double x_ext = 10.0, double smoothing_width = 5.0);
/// A trace given analytically on the whole line; panels follow `breaks`, zero outside.
TraceFunction line_trace(const std::function<double(double)>& f, std::vector<double> breaks);

/// d^k/dx^k of (1/pi) Y / (Y^2 + x^2).
double poisson_kernel(double x, double Y, int k = 0);
/// (1/pi) x / (x^2 + Y^2), the harmonic conjugate kernel.
double conjugate_kernel(double x, double Y);

struct QuadOptions {
    double tol = 1e-7;     // relative to max |f|
    int max_refinements = 3;
    int probe_stride = 8;  // error estimate on every probe_stride-th node
};

struct PoissonResult {
    Field2D v;
    double error_estimate = 0.0;
    double refinement = 1.0;  // panel-width factor that met the tolerance
};

/// Value of (P_Y * f)(x) (conjugate = false) or (Q_Y * f)(x); Y = 0 returns
/// f(x) or the principal value. `h_factor` scales every panel-width bound.
double poisson_integral(const TraceFunction& f, double x, double Y, bool conjugate = false,
                        double h_factor = 1.0);

PoissonResult poisson_extend(const TraceFunction& f, const GridPtr& euler_grid, const QuadOptions& opt = {});

struct EulerLayer {
    int index = 1;
    Field2D v, u, pressure;  // euler_Y frame
    double cr_residual = 0.0;
    double quad_error = 0.0;
    TraceFunction trace;
    std::vector<std::string> warnings;
};

/// u = int_x^{x_max} v_Y dx' + (Q_Y * f)(x_max); also returns the relative CR residual.
std::pair<Field2D, double> u_from_v(const Field2D& v, const TraceFunction& f, double tail_tol);

/// Relative max |u_Y - v_x| and |u_x + v_Y| over interior nodes with x >= x_lo.
double cr_residual(const Field2D& u, const Field2D& v, double x_lo = 1.0);
/// Max |v_xx + v_YY| over interior nodes with x >= x_lo.
double harmonic_residual(const Field2D& v, double x_lo = 1.0);

/// Relative CR, harmonicity and gradient-pressure cancellation residuals over
/// interior nodes in [x_lo, x_hi] x [Y_lo, inf), each normalized by the largest
/// term it compares.
struct HarmonicResiduals {
    double cr = 0.0, harmonic = 0.0, cancellation = 0.0;
};
HarmonicResiduals harmonic_residuals(const Field2D& u, const Field2D& v, double x_lo, double x_hi, double Y_lo);

/// Residuals on the nodes and on every second node, with the observed orders
/// log2(coarse / fine). The control pair (u, -v) is not CR and shows no order.
struct RefinementStudy {
    HarmonicResiduals fine, coarse, control_fine, control_coarse;
    double order_cr = 0.0, order_harmonic = 0.0, order_cancellation = 0.0;
    double control_order_cr = 0.0, control_order_cancellation = 0.0;
};
RefinementStudy refinement_study(const Field2D& u, const Field2D& v, double x_lo = 10.0, double x_hi = 1000.0,
                                 double Y_lo = 1.0);

/// Euler grid: x nodes shared with the physical grid, Y_j = sqrt(eps) y_j, then
/// a geometric extension up to about 10 x_max.
GridPtr euler_grid(const GridPtr& physical, double epsilon, double ratio = 1.1);

EulerLayer euler_layer(int index, std::span<const double> trace_x, std::span<const double> trace,
                       const GridPtr& euler_grid, double tail_tol, const QuadOptions& opt = {});

/// Restriction of an Euler-frame field to the physical grid (Y = sqrt(eps) y).
Field2D to_physical(const Field2D& e, const GridPtr& physical, double epsilon);

NormReport euler_report(const EulerLayer& layer, double target_slope);

}  // namespace pbl
