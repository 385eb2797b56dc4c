#include "pbl/prandtl_zero.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbl/parallel.hpp"
#include "pbl/spline.hpp"

namespace pbl {

Inflow make_inflow(const std::string& spec, double delta, const FrontProfile& front) {
    Inflow in;
    in.name = spec;
    if (spec == "gaussian_decay") {
        in.profile = [delta](double y) { return -delta * (1.0 + y * y) * std::exp(-y * y); };
    } else if (spec == "perturbed_sine") {
        in.profile = [delta](double y) { return -delta * std::exp(-y) * (1.0 + 0.3 * std::sin(y)); };
    } else if (spec == "front_exact") {
        in.in_eta = true;
        auto f = std::make_shared<FrontProfile>(front);
        in.profile = [f](double eta) { return f->phi(eta, 0); };
    } else if (spec.rfind("csv:", 0) == 0) {
        std::ifstream is(spec.substr(4));
        if (!is) throw std::invalid_argument("cannot read in-flow table " + spec.substr(4));
        std::string line;
        std::getline(is, line);
        std::vector<double> ys, us;
        while (std::getline(is, line)) {
            double a, b;
            if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) == 2) {
                ys.push_back(a);
                us.push_back(b);
            }
        }
        auto sp = std::make_shared<CubicSpline>(ys, us);
        in.profile = [sp](double y) {
            if (y >= sp->back()) return 0.0;
            return (*sp)(std::max(y, sp->front()));
        };
    } else {
        throw std::invalid_argument("unknown in-flow spec: " + spec);
    }
    return in;
}

GridPtr eta_grid(const GridPtr& g, double delta) {
    std::vector<double> eta(g->y);
    for (double& e : eta) e *= (1.0 + delta);
    return grid_from_nodes(g->x, std::move(eta), g->stretch, g->stencil_order);
}

namespace {

// q(1, eta) from U0(y): eta = int_0^y (1 + U0), solved node by node for y.
std::vector<double> initial_q(const Inflow& in, double delta, const std::vector<double>& eta) {
    std::vector<double> q(eta.size());
    if (in.in_eta) {
        for (std::size_t j = 0; j < eta.size(); ++j) q[j] = in.profile(eta[j]);
        return q;
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto integrand = [&](double y) { return 1.0 + in.profile(y); };
    double y = 0.0, e = 0.0;
    for (std::size_t j = 0; j < eta.size(); ++j) {
        double target = eta[j];
        for (int it = 0; it < 60; ++it) {
            double g = target - e;
            if (std::abs(g) < 1e-14 * (1.0 + target)) break;
            double step = g / integrand(y);
            double ynew = std::max(0.0, y + step);
            e += GK::integrate(integrand, y, ynew, 8, 1e-14);
            y = ynew;
        }
        q[j] = in.profile(y) + delta;
    }
    return q;
}

void check_inflow(const Inflow& in, double delta, double bc_tol, std::vector<std::string>& warnings) {
    if (in.in_eta) return;
    double u0 = in.profile(0.0);
    if (std::abs(u0 + delta) > bc_tol) {
        std::ostringstream os;
        os << "in-flow violates U0(0) = -delta: U0(0) = " << u0;
        throw std::invalid_argument(os.str());
    }
    if (std::abs(in.profile(1e3)) > bc_tol) throw std::invalid_argument("in-flow does not decay at infinity");
    const double h = 1e-3;
    double d2 = (2 * in.profile(0) - 5 * in.profile(h) + 4 * in.profile(2 * h) - in.profile(3 * h)) / (h * h);
    if (std::abs(d2) > 1e-4 * std::max(delta, 1e-300) + 1e-10) {
        std::ostringstream os;
        os << "in-flow corner compatibility: d^2 U0/dy^2 (0) = " << d2 << " (expected 0)";
        warnings.push_back(os.str());
    }
}

}  // namespace

Field2D march_q(const Inflow& U0, double delta, const GridPtr& physical, const MarchOptions& opt,
                std::vector<std::string>& warnings, int* newton_iterations) {
    check_inflow(U0, delta, opt.bc_tol, warnings);
    GridPtr eg = eta_grid(physical, delta);
    const std::size_t nx = eg->nx(), ny = eg->ny();
    const auto& eta = eg->y;
    Field2D q(eg, Frame::von_mises_eta, "q");

    std::vector<double> cur = initial_q(U0, delta, eta);
    cur[0] = 0.0;
    cur[ny - 1] = delta;
    std::copy(cur.begin(), cur.end(), q.column(0).begin());

    std::vector<double> h(ny - 1), m(ny);
    for (std::size_t j = 0; j + 1 < ny; ++j) h[j] = eta[j + 1] - eta[j];
    for (std::size_t j = 1; j + 1 < ny; ++j) m[j] = 0.5 * (h[j] + h[j - 1]);

    std::vector<double> R(ny), lo(ny), di(ny), up(ny), cp(ny), dp(ny), dq(ny);
    int total = 0;
    for (std::size_t i = 1; i < nx; ++i) {
        const double dx = eg->x[i] - eg->x[i - 1];
        std::vector<double> old = cur;
        int it = 0;
        while (true) {
            double rmax = 0.0;
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                double a_m = 1.0 - delta + 0.5 * (cur[j - 1] + cur[j]);
                double a_p = 1.0 - delta + 0.5 * (cur[j] + cur[j + 1]);
                if (a_m <= 0.0 || a_p <= 0.0 || 1.0 - delta + cur[j] <= 0.0) {
                    std::ostringstream os;
                    os << "loss of parabolicity at x = " << eg->x[i] << ", eta = " << eta[j];
                    throw DegeneracyError(os.str());
                }
                double Fp = a_p * (cur[j + 1] - cur[j]) / h[j];
                double Fm = a_m * (cur[j] - cur[j - 1]) / h[j - 1];
                R[j] = (cur[j] - old[j]) / dx - (Fp - Fm) / m[j];
                rmax = std::max(rmax, std::abs(R[j]) * dx);
                double dFp_j = 0.5 * (cur[j + 1] - cur[j]) / h[j] - a_p / h[j];
                double dFp_jp = 0.5 * (cur[j + 1] - cur[j]) / h[j] + a_p / h[j];
                double dFm_jm = 0.5 * (cur[j] - cur[j - 1]) / h[j - 1] - a_m / h[j - 1];
                double dFm_j = 0.5 * (cur[j] - cur[j - 1]) / h[j - 1] + a_m / h[j - 1];
                lo[j] = dFm_jm / m[j];
                di[j] = 1.0 / dx - (dFp_j - dFm_j) / m[j];
                up[j] = -dFp_jp / m[j];
            }
            if (rmax <= opt.newton_tol) break;
            if (++it > opt.max_newton) {
                std::ostringstream os;
                os << "Newton stall in march_q at x = " << eg->x[i];
                throw NewtonError(os.str(), rmax);
            }
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                double mm = di[j] - (j > 1 ? lo[j] * cp[j - 1] : 0.0);
                cp[j] = up[j] / mm;
                dp[j] = (-R[j] - (j > 1 ? lo[j] * dp[j - 1] : 0.0)) / mm;
            }
            for (std::size_t j = ny - 2; j >= 1; --j) {
                dq[j] = dp[j] - (j + 2 < ny ? cp[j] * dq[j + 1] : 0.0);
                if (j == 1) break;
            }
            for (std::size_t j = 1; j + 1 < ny; ++j) cur[j] += dq[j];
            ++total;
        }
        std::copy(cur.begin(), cur.end(), q.column(i).begin());
    }
    if (newton_iterations) *newton_iterations = total;
    q.require_finite();
    return q;
}

VonMisesMap von_mises_invert(const Field2D& q, double delta, const GridPtr& physical, double interp_tol,
                             std::vector<std::string>& warnings) {
    const std::size_t nx = q.nx(), ny = q.ny();
    const auto& eta = q.grid->y;
    VonMisesMap out{Field2D(physical, Frame::physical_y, "u0p"), Field2D(physical, Frame::physical_y, "eta_of_y"), 0.0};
    std::vector<double> col_err(nx, 0.0);
    std::vector<int> col_out(nx, 0);
    parallel_for(nx, [&](std::size_t i) {
        auto qc = q.column(i);
        std::vector<double> g(ny);
        for (std::size_t j = 0; j < ny; ++j) g[j] = 1.0 / (1.0 - delta + qc[j]);
        CubicSpline qs(eta, qc), gs(eta, g);
        const double ytop = gs.integral(eta.back());
        double e = 0.0;
        for (std::size_t j = 0; j < physical->ny(); ++j) {
            double y = physical->y[j];
            if (y > ytop) {
                col_out[i] = 1;
                e = eta.back() + (y - ytop) * (1.0 - delta + qc[ny - 1]);
                out.eta_of_y(i, j) = e;
                out.u0p(i, j) = qc[ny - 1] - delta;
                continue;
            }
            // safeguarded Newton on Y(eta) = y, warm-started from the previous node
            double lo = 0.0, hi = eta.back();
            e = std::clamp(e, lo, hi);
            for (int it = 0; it < 100; ++it) {
                double r = gs.integral(e) - y;
                if (r > 0) hi = e; else lo = e;
                if (std::abs(r) <= 1e-15 * (1.0 + y)) break;
                double en = e - r / std::max(gs(e), 1e-3);
                if (!(en > lo && en < hi)) en = 0.5 * (lo + hi);
                if (std::abs(en - e) <= 1e-16 * (1.0 + e)) { e = en; break; }
                e = en;
            }
            col_err[i] = std::max(col_err[i], std::abs(gs.integral(e) - y));
            out.eta_of_y(i, j) = e;
            out.u0p(i, j) = qs(e) - delta;
        }
        out.u0p(i, 0) = -delta;
    });
    out.roundtrip_error = *std::max_element(col_err.begin(), col_err.end());
    if (out.roundtrip_error > interp_tol) {
        std::ostringstream os;
        os << "von Mises round trip error " << out.roundtrip_error << " above interp_tol";
        warnings.push_back(os.str());
    }
    if (std::count(col_out.begin(), col_out.end(), 1) > 0)
        warnings.push_back("von Mises inversion left the eta range; q extended by its edge value");
    out.u0p.require_finite();
    return out;
}

Field2D v0p_from_u0p(const Field2D& u0p, double tail_tol) {
    Field2D r = cumulative_tail_y(diff(u0p, Axis::x, 1), tail_tol);
    r.name = "v0p";
    return r;
}

Field2D w_field(const Field2D& q, const FrontProfile& front) {
    Field2D w = map_field(q, [&](double x, double eta, double v) { return v - front_eval(front, x, eta, 0, 0); }, "w");
    return w;
}

NormReport w_report(const Field2D& q, const FrontProfile& front, double sigma0, int k_max, int m_max) {
    NormReport rep;
    Field2D w = w_field(q, front);
    for (int k = 0; k <= k_max; ++k)
        for (int m = 0; m <= m_max; ++m) {
            std::ostringstream name;
            name << "Q(sigma0," << k << ")[z^" << m << " w]";
            rep.add(name.str(), q_norm(w, sigma0, k, m), "x^{2 sigma0 + k} z^m, Q-norm");
        }
    auto sup = column_sup(w);
    std::vector<double> weighted(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) weighted[i] = std::pow(w.x(i), 0.25 - sigma0) * sup[i];
    double wsup = *std::max_element(weighted.begin(), weighted.end());
    rep.add("sup_x x^(1/4-sigma0) |w|_inf", wsup, "x^(1/4-sigma0) sup");
    const auto& xs = w.grid->x;
    bool positive = std::all_of(sup.begin(), sup.end(), [](double v) { return v > 0.0; });
    if (positive && xs.back() >= 1000.0) {
        rep.slope_fits.push_back({"|w|_inf", 10.0, 1000.0, decay_fit(xs, sup, 10.0, 1000.0), "", {}});
        rep.slope_fits.push_back(
            {"x^(1/4-sigma0)|w|_inf", 10.0, 1000.0, decay_fit(xs, weighted, 10.0, 1000.0), "<= 0.05", {}});
        rep.slope_fits.back().pass = rep.slope_fits.back().fit.slope <= 0.05;
    }
    return rep;
}

MarchStudy march_convergence(const FrontProfile& front, const std::vector<int>& nx, double x_end, double y_max,
                             int ny, const MarchOptions& opt) {
    MarchStudy st;
    Inflow in = make_inflow("front_exact", front.delta, front);
    for (int n : nx) {
        GridPtr g = make_grid(x_end, n, y_max, ny, StretchLaw::geometric(1.03), 2);
        std::vector<std::string> warnings;
        Field2D q = march_q(in, front.delta, g, opt, warnings);
        for (double v : q.values) st.min_one_plus_u = std::min(st.min_one_plus_u, 1.0 - front.delta + v);
        const double e = w_field(q, front).column_max_abs(g->nx() - 1);
        st.factor.push_back(st.error.empty() ? 0.0 : st.error.back() / e);
        st.nx.push_back(n);
        st.error.push_back(e);
    }
    return st;
}

Prandtl0Solution solve_prandtl_zero(const Inflow& U0, double delta, const FrontProfile& front,
                                    const GridPtr& physical, const MarchOptions& opt, double interp_tol,
                                    double tail_tol) {
    Prandtl0Solution s;
    s.delta = delta;
    s.q = march_q(U0, delta, physical, opt, s.warnings, &s.newton_iterations);
    auto vm = von_mises_invert(s.q, delta, physical, interp_tol, s.warnings);
    s.u0p = std::move(vm.u0p);
    s.eta_of_y = std::move(vm.eta_of_y);
    s.v0p = v0p_from_u0p(s.u0p, tail_tol);
    for (auto& w : s.v0p.warnings) s.warnings.push_back(w);
    s.w = w_field(s.q, front);
    double mn = 1e300;
    for (double v : s.u0p.values) mn = std::min(mn, 1.0 + v);
    for (double v : s.q.values) mn = std::min(mn, 1.0 - delta + v);
    s.min_one_plus_u = mn;
    return s;
}

}  // namespace pbl
