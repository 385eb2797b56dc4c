#include "pbl/euler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pbl/parallel.hpp"
#include "pbl/smooth.hpp"
#include "pbl/spline.hpp"

namespace pbl {

namespace {

constexpr double gl_x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double gl_w[4] = {0.3478548451374638, 0.6521451548625461, 0.6521451548625461, 0.3478548451374638};

double horner(const double* c, double s) { return c[0] + s * (c[1] + s * (c[2] + s * c[3])); }

}  // namespace

double TraceFunction::eval_panel(const Panel& p, double t) const {
    switch (p.kind) {
        case 0: return horner(p.c, t - p.t0);
        case 1: {
            double v = horner(p.c, 2.0 - t - p.t0);
            if (t < blend_hi) v *= smooth_step((t - blend_lo) / (blend_hi - blend_lo));
            return v;
        }
        default: return generic(t);
    }
}

double TraceFunction::operator()(double t) const {
    if (panels.empty()) return 0.0;
    if (t > tail_start) return tail_coeff == 0.0 ? 0.0 : tail_coeff * std::pow(t / tail_start, -tail_exponent);
    if (t < panels.front().a) return 0.0;
    auto it = std::upper_bound(panels.begin(), panels.end(), t, [](double v, const Panel& p) { return v < p.a; });
    return eval_panel(*std::prev(it), t);
}

void TraceFunction::prepare() {
    segments.clear();
    for (std::size_t k = 0; k < panels.size(); ++k) {
        Segment s;
        s.a = panels[k].a;
        s.b = panels[k].b;
        s.panel = int(k);
        for (int q = 0; q < 4; ++q) s.f[q] = eval_panel(panels[k], 0.5 * (s.a + s.b) + 0.5 * (s.b - s.a) * gl_x[q]);
        segments.push_back(s);
    }
    if (tail_coeff != 0.0) {
        const double ds = 0.25;
        for (double s0 = 0.0; s0 < tail_span - 1e-12; s0 += ds) {
            Segment s;
            s.a = s0;
            s.b = s0 + ds;
            s.tail = true;
            for (int q = 0; q < 4; ++q)
                s.f[q] = tail_coeff * std::exp(-tail_exponent * (0.5 * (s.a + s.b) + 0.5 * ds * gl_x[q]));
            segments.push_back(s);
        }
    }
}

TraceFunction extend_trace(std::span<const double> x, std::span<const double> f, double x_ext,
                           double smoothing_width) {
    if (x.size() != f.size() || x.size() < 4) throw std::invalid_argument("extend_trace: need >= 4 samples");
    TraceFunction tr;
    tr.sample_x.assign(x.begin(), x.end());
    tr.sample_f.assign(f.begin(), f.end());
    tr.blend_lo = -x_ext;
    tr.blend_hi = -x_ext + smoothing_width;
    CubicSpline sp(x, f);
    const std::size_t n = x.size();

    // reflected part, left to right
    for (std::size_t k = n - 1; k-- > 0;) {
        double a = 2.0 - x[k + 1], b = 2.0 - x[k];
        if (b <= tr.blend_lo) continue;
        a = std::max(a, tr.blend_lo);
        TraceFunction::Panel p;
        p.kind = 1;
        p.t0 = x[k];
        sp.piece(k, p.c);
        if (a < tr.blend_hi && b > tr.blend_hi) {
            p.a = a;
            p.b = tr.blend_hi;
            tr.panels.push_back(p);
            a = tr.blend_hi;
        }
        p.a = a;
        p.b = b;
        tr.panels.push_back(p);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        TraceFunction::Panel p;
        p.kind = 0;
        p.a = x[k];
        p.b = x[k + 1];
        p.t0 = x[k];
        sp.piece(k, p.c);
        tr.panels.push_back(p);
    }
    tr.tail_start = x[n - 1];

    // power-law tail fitted on the last decade
    std::vector<double> xs, gs;
    bool one_sign = true;
    for (std::size_t k = 0; k < n; ++k) {
        if (x[k] < x[n - 1] / 10.0) continue;
        if (f[k] * f[n - 1] <= 0.0) one_sign = false;
        xs.push_back(x[k]);
        gs.push_back(std::abs(f[k]));
    }
    if (one_sign && xs.size() >= 8 && f[n - 1] != 0.0) {
        DecayFit fit = decay_fit(xs, gs, xs.front(), xs.back());
        tr.tail_exponent = std::clamp(-fit.slope, 0.05, 4.0);
        tr.tail_coeff = f[n - 1];
    }
    tr.decay_exponent_hint = tr.tail_exponent;
    tr.prepare();
    return tr;
}

TraceFunction extend_trace(const std::function<double(double)>& trace, std::span<const double> x, double x_ext,
                           double smoothing_width) {
    std::vector<double> f(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) f[k] = trace(x[k]);
    return extend_trace(x, f, x_ext, smoothing_width);
}

TraceFunction line_trace(const std::function<double(double)>& f, std::vector<double> breaks) {
    std::sort(breaks.begin(), breaks.end());
    TraceFunction tr;
    tr.generic = f;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        TraceFunction::Panel p;
        p.kind = 2;
        p.a = breaks[k];
        p.b = breaks[k + 1];
        tr.panels.push_back(p);
    }
    tr.tail_start = breaks.back();
    tr.prepare();
    return tr;
}

double poisson_kernel(double x, double Y, int k) {
    if (!(Y > 0.0)) throw std::invalid_argument("poisson_kernel: Y must be positive");
    const double r = x * x + Y * Y;
    switch (k) {
        case 0: return Y / r / M_PI;
        case 1: return -2.0 * x * Y / (r * r) / M_PI;
        case 2: return Y * (6.0 * x * x - 2.0 * Y * Y) / (r * r * r) / M_PI;
        case 3: return 24.0 * x * Y * (Y * Y - x * x) / (r * r * r * r) / M_PI;
        default: throw std::invalid_argument("poisson_kernel: k must be 0..3");
    }
}

double conjugate_kernel(double x, double Y) { return x / (x * x + Y * Y) / M_PI; }

double poisson_integral(const TraceFunction& f, double x, double Y, bool conjugate, double h_factor) {
    if (Y == 0.0 && !conjugate) return f(x);
    if (f.panels.empty()) return 0.0;
    const bool pv = conjugate && Y == 0.0;
    const double fx = pv ? f(x) : 0.0;
    const double Ye = Y > 0.0 ? Y : 1e-2;
    auto kern = [&](double t, double ft) {
        double d = x - t;
        if (pv) return (ft - fx) / d / M_PI;
        double r = d * d + Y * Y;
        return (conjugate ? d : Y) * ft / r / M_PI;
    };
    auto hreq = [&](double d) {
        return h_factor * (d <= 8.0 * Ye ? 0.25 * Ye : 0.25 * std::sqrt(d * d + Ye * Ye));
    };
    const double ts = f.tail_start;
    auto to_t = [&](const TraceFunction::Segment& s, double u) { return s.tail ? ts * std::exp(u) : u; };

    double total = 0.0;
    struct Piece { double a, b; };
    std::vector<Piece> stack;
    for (const auto& seg : f.segments) {
        double ta = to_t(seg, seg.a), tb = to_t(seg, seg.b);
        double d = x < ta ? ta - x : (x > tb ? x - tb : 0.0);
        if (tb - ta <= hreq(d)) {
            double mid = 0.5 * (seg.a + seg.b), half = 0.5 * (seg.b - seg.a), acc = 0.0;
            for (int q = 0; q < 4; ++q) {
                double u = mid + half * gl_x[q];
                double t = to_t(seg, u);
                acc += gl_w[q] * kern(t, seg.f[q]) * (seg.tail ? t : 1.0);
            }
            total += acc * half;
            continue;
        }
        stack.clear();
        if (!seg.tail && x > seg.a && x < seg.b) {
            stack.push_back({seg.a, x});
            stack.push_back({x, seg.b});
        } else {
            stack.push_back({seg.a, seg.b});
        }
        const TraceFunction::Panel* panel = seg.tail ? nullptr : &f.panels[seg.panel];
        while (!stack.empty()) {
            Piece p = stack.back();
            stack.pop_back();
            double pa = to_t(seg, p.a), pb = to_t(seg, p.b);
            double dd = x < pa ? pa - x : (x > pb ? x - pb : 0.0);
            if (pb - pa > hreq(dd) && (p.b - p.a) > 1e-14 * (1.0 + std::abs(p.a))) {
                double m = 0.5 * (p.a + p.b);
                stack.push_back({p.a, m});
                stack.push_back({m, p.b});
                continue;
            }
            double mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a), acc = 0.0;
            for (int q = 0; q < 4; ++q) {
                double u = mid + half * gl_x[q];
                double t = to_t(seg, u);
                double ft = seg.tail ? f.tail_coeff * std::exp(-f.tail_exponent * u) : f.eval_panel(*panel, t);
                acc += gl_w[q] * kern(t, ft) * (seg.tail ? t : 1.0);
            }
            total += acc * half;
        }
    }

    // beyond the covered range
    double T = f.tail_start;
    if (f.tail_coeff != 0.0) {
        T = ts * std::exp(f.tail_span);
        double c = f.tail_coeff * std::pow(ts, f.tail_exponent);
        double w = f.tail_exponent;
        if (conjugate) total += -c * std::pow(T, -w) / w / M_PI;
        else total += Y * c * std::pow(T, -w - 1.0) / (w + 1.0) / M_PI;
    }
    if (pv) {
        double A = f.panels.front().a;
        total += fx / M_PI * (std::log(x - A) - std::log(T - x));
    }
    return total;
}

PoissonResult poisson_extend(const TraceFunction& f, const GridPtr& eg, const QuadOptions& opt) {
    const std::size_t nx = eg->nx(), ny = eg->ny();
    double fmax = 0.0;
    for (double v : f.sample_f) fmax = std::max(fmax, std::abs(v));
    for (const auto& s : f.segments)
        for (double v : s.f) fmax = std::max(fmax, std::abs(v));
    PoissonResult res;
    res.v = Field2D(eg, Frame::euler_Y, "v_e");
    if (fmax == 0.0) return res;

    std::vector<std::pair<std::size_t, std::size_t>> probes;
    for (std::size_t i = 0; i < nx; i += opt.probe_stride)
        for (std::size_t j = 1; j < ny; j += opt.probe_stride) probes.emplace_back(i, j);
    auto probe = [&](double h) {
        std::vector<double> out(probes.size());
        parallel_for(probes.size(), [&](std::size_t k) {
            auto [i, j] = probes[k];
            out[k] = poisson_integral(f, eg->x[i], eg->y[j], false, h);
        });
        return out;
    };
    double h = 1.0;
    std::vector<double> coarse = probe(h);
    double err = 0.0;
    for (int r = 0;; ++r) {
        std::vector<double> fine = probe(0.5 * h);
        err = 0.0;
        for (std::size_t k = 0; k < probes.size(); ++k) err = std::max(err, std::abs(fine[k] - coarse[k]));
        err /= fmax;
        if (err <= opt.tol) break;
        if (r + 1 >= opt.max_refinements) {
            std::ostringstream os;
            os << "Poisson quadrature did not converge: relative change " << err << " at panel factor "
               << 0.5 * h << " (previous factor " << h << ")";
            throw std::runtime_error(os.str());
        }
        h *= 0.5;
        coarse = std::move(fine);
    }
    res.error_estimate = err;
    res.refinement = h;
    parallel_for(nx, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) res.v(i, j) = poisson_integral(f, eg->x[i], eg->y[j], false, h);
    });
    res.v.require_finite();
    return res;
}

std::pair<Field2D, double> u_from_v(const Field2D& v, const TraceFunction& f, double tail_tol) {
    Field2D vY = diff(v, Axis::y, 1);
    vY.name = "v_Y";
    Field2D u = cumulative_tail_x(vY, tail_tol);
    const std::size_t last = v.nx() - 1;
    const double xm = v.x(last);
    std::vector<double> c(v.ny());
    parallel_for(v.ny(), [&](std::size_t j) { c[j] = poisson_integral(f, xm, v.y(j), true); });
    for (std::size_t i = 0; i < v.nx(); ++i)
        for (std::size_t j = 0; j < v.ny(); ++j) u(i, j) += c[j];
    u.name = "u_e";
    u.frame = v.frame;
    u.require_finite();
    return {u, cr_residual(u, v)};
}

double cr_residual(const Field2D& u, const Field2D& v, double x_lo) {
    Field2D ux = diff(u, Axis::x, 1), uY = diff(u, Axis::y, 1);
    Field2D vx = diff(v, Axis::x, 1), vY = diff(v, Axis::y, 1);
    double scale = std::max(vx.max_abs(), vY.max_abs());
    if (scale == 0.0) return 0.0;
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < u.nx(); ++i) {
        if (u.x(i) < x_lo) continue;
        for (std::size_t j = 1; j + 1 < u.ny(); ++j)
            r = std::max({r, std::abs(uY(i, j) - vx(i, j)), std::abs(ux(i, j) + vY(i, j))});
    }
    return r / scale;
}

double harmonic_residual(const Field2D& v, double x_lo) {
    Field2D vxx = diff(v, Axis::x, 2), vYY = diff(v, Axis::y, 2);
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < v.nx(); ++i) {
        if (v.x(i) < x_lo) continue;
        for (std::size_t j = 1; j + 1 < v.ny(); ++j) r = std::max(r, std::abs(vxx(i, j) + vYY(i, j)));
    }
    return r;
}

HarmonicResiduals harmonic_residuals(const Field2D& u, const Field2D& v, double x_lo, double x_hi, double Y_lo) {
    Field2D ux = diff(u, Axis::x, 1), uY = diff(u, Axis::y, 1), vx = diff(v, Axis::x, 1), vY = diff(v, Axis::y, 1);
    Field2D vxx = diff(v, Axis::x, 2), vYY = diff(v, Axis::y, 2);
    Field2D P = -0.5 * (u * u + v * v);
    Field2D Px = diff(P, Axis::x, 1), PY = diff(P, Axis::y, 1);
    double n[3] = {0, 0, 0}, d[3] = {0, 0, 0};
    for (std::size_t i = 1; i + 1 < u.nx(); ++i) {
        if (u.x(i) < x_lo || u.x(i) > x_hi) continue;
        for (std::size_t j = 1; j + 1 < u.ny(); ++j) {
            if (u.y(j) < Y_lo) continue;
            n[0] = std::max({n[0], std::abs(uY(i, j) - vx(i, j)), std::abs(ux(i, j) + vY(i, j))});
            d[0] = std::max({d[0], std::abs(uY(i, j)), std::abs(ux(i, j))});
            n[1] = std::max(n[1], std::abs(vxx(i, j) + vYY(i, j)));
            d[1] = std::max({d[1], std::abs(vxx(i, j)), std::abs(vYY(i, j))});
            const double ex = u(i, j) * ux(i, j) + v(i, j) * uY(i, j), ey = u(i, j) * vx(i, j) + v(i, j) * vY(i, j);
            n[2] = std::max({n[2], std::abs(Px(i, j) + ex), std::abs(PY(i, j) + ey)});
            d[2] = std::max({d[2], std::abs(ex), std::abs(ey)});
        }
    }
    auto q = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
    return {q(n[0], d[0]), q(n[1], d[1]), q(n[2], d[2])};
}

RefinementStudy refinement_study(const Field2D& u, const Field2D& v, double x_lo, double x_hi, double Y_lo) {
    GridPtr coarse = subsample(u.grid, 2);
    Field2D uc = restrict_field(u, coarse, 2), vc = restrict_field(v, coarse, 2);
    RefinementStudy r;
    r.fine = harmonic_residuals(u, v, x_lo, x_hi, Y_lo);
    r.coarse = harmonic_residuals(uc, vc, x_lo, x_hi, Y_lo);
    r.control_fine = harmonic_residuals(u, -1.0 * v, x_lo, x_hi, Y_lo);
    r.control_coarse = harmonic_residuals(uc, -1.0 * vc, x_lo, x_hi, Y_lo);
    auto order = [](double c, double f) { return f > 0.0 && c > 0.0 ? std::log2(c / f) : 0.0; };
    r.order_cr = order(r.coarse.cr, r.fine.cr);
    r.order_harmonic = order(r.coarse.harmonic, r.fine.harmonic);
    r.order_cancellation = order(r.coarse.cancellation, r.fine.cancellation);
    r.control_order_cr = order(r.control_coarse.cr, r.control_fine.cr);
    r.control_order_cancellation = order(r.control_coarse.cancellation, r.control_fine.cancellation);
    return r;
}

GridPtr euler_grid(const GridPtr& physical, double epsilon, double ratio) {
    std::vector<double> Y(physical->y);
    const double se = std::sqrt(epsilon);
    for (double& v : Y) v *= se;
    const double target = 10.0 * physical->x.back();
    double h = Y.back() - Y[Y.size() - 2];
    while (Y.back() < target) {
        h *= ratio;
        Y.push_back(Y.back() + h);
    }
    return grid_from_nodes(physical->x, std::move(Y), physical->stretch, physical->stencil_order);
}

EulerLayer euler_layer(int index, std::span<const double> trace_x, std::span<const double> trace,
                       const GridPtr& eg, double tail_tol, const QuadOptions& opt) {
    EulerLayer L;
    L.index = index;
    L.trace = extend_trace(trace_x, trace);
    PoissonResult pr = poisson_extend(L.trace, eg, opt);
    L.v = std::move(pr.v);
    L.quad_error = pr.error_estimate;
    auto [u, cr] = u_from_v(L.v, L.trace, tail_tol);
    L.u = std::move(u);
    L.cr_residual = cr;
    L.pressure = -1.0 * L.u;
    L.v.name = "v" + std::to_string(index) + "_e";
    L.u.name = "u" + std::to_string(index) + "_e";
    L.pressure.name = "P" + std::to_string(index) + "_e";
    L.warnings = L.u.warnings;
    return L;
}

Field2D to_physical(const Field2D& e, const GridPtr& physical, double epsilon) {
    const double se = std::sqrt(epsilon);
    Field2D out(physical, Frame::physical_y, e.name);
    out.warnings = e.warnings;
    bool aligned = e.ny() >= physical->ny();
    for (std::size_t j = 0; aligned && j < physical->ny(); ++j)
        aligned = std::abs(e.y(j) - se * physical->y[j]) <= 1e-12 * (1.0 + e.y(j));
    if (e.nx() != physical->nx()) throw std::invalid_argument("to_physical: x nodes differ");
    for (std::size_t i = 0; i < e.nx(); ++i) {
        auto col = e.column(i);
        if (aligned) {
            std::copy(col.begin(), col.begin() + physical->ny(), out.column(i).begin());
            continue;
        }
        CubicSpline sp(e.grid->y, col);
        bool clamped = false;
        for (std::size_t j = 0; j < physical->ny(); ++j) {
            double Y = se * physical->y[j];
            if (Y > e.grid->y.back()) {
                Y = e.grid->y.back();
                clamped = true;
            }
            out(i, j) = sp(Y);
        }
        if (clamped && i == 0) out.warnings.push_back("to_physical: Y beyond the Euler grid, clamped");
    }
    return out;
}

NormReport euler_report(const EulerLayer& L, double target) {
    NormReport rep;
    const auto& xs = L.v.grid->x;
    auto vx = diff(L.v, Axis::x, 1), ux = diff(L.u, Axis::x, 1);
    auto add = [&](const std::string& q, const std::vector<double>& g, double tgt, double tol) {
        for (std::size_t i = 0; i < g.size(); ++i)
            if (xs[i] >= 10.0 && xs[i] <= 1000.0 && !(g[i] > 0.0)) return;
        SlopeEntry e{q, 10.0, 1000.0, decay_fit(xs, g, 10.0, 1000.0), {}, {}};
        if (tol > 0) {
            std::ostringstream os;
            os << tgt << " +/- " << tol;
            e.target = os.str();
            e.pass = std::abs(e.fit.slope - tgt) <= tol;
        }
        rep.slope_fits.push_back(e);
    };
    std::string k = std::to_string(L.index);
    add("sup_Y|v" + k + "_e|", column_sup(L.v), target, 0.05);
    add("sup_Y|d_x v" + k + "_e|", column_sup(vx), target - 1.0, 0.10);
    add("sup_Y|u" + k + "_e|", column_sup(L.u), 0, 0);
    add("sup_Y|d_x u" + k + "_e|", column_sup(ux), 0, 0);
    rep.add("cr_residual", L.cr_residual);
    rep.add("quadrature_error", L.quad_error);
    return rep;
}

}  // namespace pbl
