#include "pbl/layers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>

#include "pbl/smooth.hpp"

namespace pbl {

double sigma_i(int i, int n) { return std::pow(3.0, i) / (std::pow(3.0, n) * 1e4); }

PartialSums partial_sums(const LayerSet& L, int np, int ne, int npa) {
    const double e = L.epsilon;
    PartialSums s{Field2D(L.grid, Frame::physical_y, "UP"), Field2D(L.grid, Frame::physical_y, "VP"),
                  Field2D(L.grid, Frame::physical_y, "UE"), Field2D(L.grid, Frame::physical_y, "VE"),
                  Field2D(L.grid, Frame::physical_y, "PPa")};
    for (int j = 0; j < np; ++j) {
        s.UP += std::pow(e, 0.5 * j) * L.up[j];
        s.VP += std::pow(e, 0.5 * j) * L.vp[j];
    }
    for (int j = 1; j <= ne; ++j) {
        s.UE += std::pow(e, 0.5 * j) * L.ue[j];
        s.VE += std::pow(e, 0.5 * (j - 1)) * L.ve[j];
    }
    for (int j = 1; j <= npa; ++j) s.PPa += L.ppa[j];
    return s;
}

Field2D structural_ru(const PartialSums& s, double eps) {
    const auto& g = s.UP;
    Field2D UPx = diff(g, Axis::x, 1), UPy = diff(g, Axis::y, 1);
    Field2D UPxx = diff(g, Axis::x, 2), UPyy = diff(g, Axis::y, 2);
    Field2D UEx = diff(s.UE, Axis::x, 1), UEy = diff(s.UE, Axis::y, 1);
    Field2D Px = diff(s.PPa, Axis::x, 1);
    Field2D r(g.grid, Frame::physical_y, "Ru");
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        double up = g.values[k], ue = s.UE.values[k], vp = s.VP.values[k], ve = s.VE.values[k];
        r.values[k] = -eps * UPxx.values[k] - UPyy.values[k] + (1.0 + up) * UPx.values[k] + up * UEx.values[k] +
                      ue * UPx.values[k] + vp * UPy.values[k] + vp * UEy.values[k] + ve * UPy.values[k] +
                      Px.values[k];
    }
    return r;
}

Field2D structural_rv(const PartialSums& s, double eps) {
    const auto& V = s.VP;
    Field2D VPx = diff(V, Axis::x, 1), VPy = diff(V, Axis::y, 1);
    Field2D VPxx = diff(V, Axis::x, 2), VPyy = diff(V, Axis::y, 2);
    Field2D VEx = diff(s.VE, Axis::x, 1), VEy = diff(s.VE, Axis::y, 1);
    Field2D Py = diff(s.PPa, Axis::y, 1);
    Field2D r(V.grid, Frame::physical_y, "Rv");
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        double up = s.UP.values[k], ue = s.UE.values[k], vp = V.values[k], ve = s.VE.values[k];
        r.values[k] = -eps * VPxx.values[k] - VPyy.values[k] + (1.0 + up) * VPx.values[k] + up * VEx.values[k] +
                      ue * VPx.values[k] + vp * VPy.values[k] + vp * VEy.values[k] + ve * VPy.values[k] +
                      Py.values[k] / eps;
    }
    return r;
}

double homogenizer(double y, int k) {
    const double e = std::exp(-y);
    switch (k) {
        case -1: return (y + y * y) * e;
        case 0: return (1.0 + y - y * y) * e;
        case 1: return (y * y - 3.0 * y) * e;
        case 2: return (-y * y + 5.0 * y - 3.0) * e;
        default: throw std::invalid_argument("homogenizer: k must be -1..2");
    }
}

LayerSolution solve_linear_layer(const LayerCoefficients& c, bool final_layer, double tail_tol) {
    const GridPtr& g = c.F.grid;
    const std::size_t nx = g->nx(), ny = g->ny();
    const auto& y = g->y;
    const int order = g->stencil_order;
    Stencil s1 = make_stencil(y, 1, order), s2 = make_stencil(y, 2, order);
    std::vector<double> bx = diff_line(g->x, c.b, 1, order);

    std::vector<double> chi(ny), chi1(ny), chi2(ny), ichi(ny);
    for (std::size_t j = 0; j < ny; ++j) {
        chi[j] = homogenizer(y[j], 0);
        chi1[j] = homogenizer(y[j], 1);
        chi2[j] = homogenizer(y[j], 2);
        ichi[j] = homogenizer(y[j], -1);
    }

    Field2D ut(g, Frame::physical_y, "u_tilde");
    for (std::size_t j = 1; j + 1 < ny; ++j) ut(0, j) = c.U(y[j]) - chi[j] * c.b[0];

    const int m = int(ny) - 2;  // interior rows; unknowns (u_j, s_j) interleaved
    const int N = 2 * m;
    auto iu = [](std::size_t j) { return 2 * (int(j) - 1); };
    auto is = [](std::size_t j) { return 2 * (int(j) - 1) + 1; };
    Eigen::SparseMatrix<double> M(N, N);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;
    Eigen::VectorXd rhs(N), sol(N);
    std::vector<Eigen::Triplet<double>> trip;

    for (std::size_t i = 1; i < nx; ++i) {
        const double dx = g->x[i] - g->x[i - 1];
        auto old = ut.column(i - 1);
        trip.clear();
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            const double a = c.a(i, j), A = c.A(i, j), B = c.B(i, j), C = c.C(i, j);
            // forcing for the homogenized unknown: F - L(chi b)
            double Lchi = a * chi[j] * bx[i] + A * chi[j] * c.b[i] + B * chi1[j] * c.b[i] - C * bx[i] * ichi[j] -
                          chi2[j] * c.b[i];
            trip.emplace_back(iu(j), iu(j), a / dx + A);
            for (std::size_t l = 0; l < s1.size[j]; ++l) {
                std::size_t col = s1.start[j] + l;
                if (col == 0 || col + 1 == ny) continue;
                trip.emplace_back(iu(j), iu(col), B * s1.w[j][l]);
            }
            for (std::size_t l = 0; l < s2.size[j]; ++l) {
                std::size_t col = s2.start[j] + l;
                if (col == 0 || col + 1 == ny) continue;
                trip.emplace_back(iu(j), iu(col), -s2.w[j][l]);
            }
            trip.emplace_back(iu(j), is(j), -C);
            rhs[iu(j)] = c.F(i, j) - Lchi + a * old[j] / dx;

            // s_j - s_{j-1} = (h/2)(D_j + D_{j-1}), D = (u - u_old)/dx
            const double h = y[j] - y[j - 1];
            trip.emplace_back(is(j), is(j), 1.0);
            trip.emplace_back(is(j), iu(j), -0.5 * h / dx);
            double r = -0.5 * h * old[j] / dx;
            if (j > 1) {
                trip.emplace_back(is(j), is(j - 1), -1.0);
                trip.emplace_back(is(j), iu(j - 1), -0.5 * h / dx);
                r -= 0.5 * h * old[j - 1] / dx;
            }
            rhs[is(j)] = r;
        }
        M.setFromTriplets(trip.begin(), trip.end());
        if (!analyzed) {
            lu.analyzePattern(M);
            analyzed = true;
        }
        lu.factorize(M);
        if (lu.info() != Eigen::Success) {
            std::ostringstream os;
            os << "layer solve: singular system at x = " << g->x[i];
            throw DegeneracyError(os.str());
        }
        sol = lu.solve(rhs);
        for (std::size_t j = 1; j + 1 < ny; ++j) ut(i, j) = sol[iu(j)];
    }

    LayerSolution out{Field2D(g, Frame::physical_y, "u_p"), Field2D()};
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) out.u(i, j) = ut(i, j) + chi[j] * c.b[i];
    out.u.require_finite();
    Field2D ux = diff(out.u, Axis::x, 1);
    ux.name = "d_x u_p";
    if (final_layer) {
        out.v = -1.0 * cumulative_y(ux);
    } else {
        out.v = cumulative_tail_y(ux, tail_tol);
    }
    out.v.name = "v_p";
    return out;
}

MmsStudy manufactured_study(const std::vector<int>& nx, double x_max, double y_max, int ny) {
    MmsStudy st;
    for (int n : nx) {
        GridPtr g = make_grid(x_max, n, y_max, ny, StretchLaw::geometric(1.03), 2);
        auto S = [&](const std::function<double(double, double)>& f) {
            return sample_field(g, Frame::physical_y, "mms", f);
        };
        LayerCoefficients c;
        c.a = S([](double, double y) { return 1.0 + 0.1 * std::exp(-y); });
        c.A = S([](double x, double) { return 0.2 / x; });
        c.B = S([](double, double y) { return 0.1 * y * std::exp(-y); });
        c.C = S([](double, double y) { return 0.05 * std::exp(-y); });
        c.F = S([](double x, double y) {
            const double e = std::exp(-y);
            const double u = e / x, ux = -e / (x * x), uy = -u, uyy = u, v = (1.0 - e) / (x * x);
            return (1.0 + 0.1 * e) * ux + 0.2 / x * u + 0.1 * y * e * uy + 0.05 * e * v - uyy;
        });
        c.b.resize(g->nx());
        for (std::size_t i = 0; i < g->nx(); ++i) c.b[i] = 1.0 / g->x[i];
        c.U = [](double y) { return std::exp(-y); };
        LayerSolution sol = solve_linear_layer(c, true, 1e-3);
        const double eu = (sol.u - S([](double x, double y) { return std::exp(-y) / x; })).max_abs();
        const double ev = (sol.v - S([](double x, double y) { return (1.0 - std::exp(-y)) / (x * x); })).max_abs();
        st.factor_u.push_back(st.error_u.empty() ? 0.0 : st.error_u.back() / eu);
        st.factor_v.push_back(st.error_v.empty() ? 0.0 : st.error_v.back() / ev);
        st.nx.push_back(n);
        st.error_u.push_back(eu);
        st.error_v.push_back(ev);
    }
    return st;
}

Field2D apply_layer_operator(const LayerCoefficients& c, const Field2D& u, const Field2D& v) {
    Field2D ux = diff(u, Axis::x, 1), uy = diff(u, Axis::y, 1), uyy = diff(u, Axis::y, 2);
    Field2D r(u.grid, Frame::physical_y, "L(u,v)");
    for (std::size_t i = 0; i < u.nx(); ++i)
        for (std::size_t j = 0; j < u.ny(); ++j)
            r(i, j) = c.a(i, j) * ux(i, j) + c.A(i, j) * u(i, j) + c.B(i, j) * uy(i, j) +
                      c.C(i, j) * (v(i, j) - v(i, 0)) - uyy(i, j);
    return r;
}

Field2D layer0_defect(const Field2D& u0p, const Field2D& v0p) {
    Field2D ux = diff(u0p, Axis::x, 1), uy = diff(u0p, Axis::y, 1), uyy = diff(u0p, Axis::y, 2);
    Field2D r(u0p.grid, Frame::physical_y, "D0");
    for (std::size_t i = 0; i < u0p.nx(); ++i)
        for (std::size_t j = 0; j < u0p.ny(); ++j)
            r(i, j) = (1.0 + u0p(i, j)) * ux(i, j) + (v0p(i, j) - v0p(i, 0)) * uy(i, j) - uyy(i, j);
    return r;
}

CutoffFields cutoff_fields(const GridPtr& g, double eps) {
    const double se = std::sqrt(eps);
    CutoffFields f{Field2D(g, Frame::physical_y, "chi"), Field2D(g, Frame::physical_y, "chi_x"),
                   Field2D(g, Frame::physical_y, "chi_y"), Field2D(g, Frame::physical_y, "chi_yy")};
    for (std::size_t i = 0; i < g->nx(); ++i) {
        const double x = g->x[i], sx = std::sqrt(x);
        for (std::size_t j = 0; j < g->ny(); ++j) {
            const double s = se * g->y[j] / sx;
            const double d1 = cutoff(s, 1);
            f.chi(i, j) = cutoff(s, 0);
            f.chi_x(i, j) = -s / (2.0 * x) * d1;
            f.chi_y(i, j) = se / sx * d1;
            f.chi_yy(i, j) = eps / x * cutoff(s, 2);
        }
    }
    return f;
}

Field2D cutoff_error(const Field2D& up, const Field2D& vp, const Field2D& G, const LayerCoefficients& c,
                     double eps) {
    CutoffFields k = cutoff_fields(up.grid, eps);
    Field2D upy = diff(up, Axis::y, 1), Gy = diff(G, Axis::y, 1), Gyy = diff(G, Axis::y, 2);
    Field2D e(up.grid, Frame::physical_y, "E_n");
    for (std::size_t q = 0; q < e.values.size(); ++q) {
        const double cy = k.chi_y.values[q], u = up.values[q];
        e.values[q] = -(1.0 - k.chi.values[q]) * c.F.values[q] - c.a.values[q] * cy * vp.values[q] +
                      c.B.values[q] * cy * u - 2.0 * cy * upy.values[q] - k.chi_yy.values[q] * u +
                      c.A.values[q] * G.values[q] + c.B.values[q] * Gy.values[q] - Gyy.values[q];
    }
    return e;
}

CutoffResult cutoff_final_layer(const Field2D& up, const Field2D& vp, const LayerCoefficients& c, double eps,
                                double tail_tol) {
    CutoffFields k = cutoff_fields(up.grid, eps);
    CutoffResult r;
    r.G = cumulative_tail_x(k.chi_x * up + k.chi_y * vp, tail_tol);
    r.G.name = "G";
    r.u = k.chi * up + r.G;
    r.v = k.chi * vp;
    r.u.name = "u_p^n";
    r.v.name = "v_p^n";
    r.u.warnings = r.G.warnings;
    r.error = cutoff_error(up, vp, r.G, c, eps);
    return r;
}

namespace {

Cancellation cancellation_pairs(const std::vector<std::pair<const EulerLayer*, const EulerLayer*>>& pairs,
                                const GridPtr& eg, double x_lo) {
    Cancellation out{Field2D(eg, Frame::euler_Y, "P_a_e"), 0.0};
    if (pairs.empty()) return out;
    Field2D Ex(eg, Frame::euler_Y, "Ex"), EY(eg, Frame::euler_Y, "EY");
    for (auto [p, q] : pairs) {
        Field2D qux = diff(q->u, Axis::x, 1), quY = diff(q->u, Axis::y, 1);
        Field2D qvx = diff(q->v, Axis::x, 1), qvY = diff(q->v, Axis::y, 1);
        for (std::size_t k = 0; k < out.P.values.size(); ++k) {
            out.P.values[k] -= 0.5 * (p->u.values[k] * q->u.values[k] + p->v.values[k] * q->v.values[k]);
            Ex.values[k] += p->u.values[k] * qux.values[k] + p->v.values[k] * quY.values[k];
            EY.values[k] += p->u.values[k] * qvx.values[k] + p->v.values[k] * qvY.values[k];
        }
    }
    Field2D Px = diff(out.P, Axis::x, 1), PY = diff(out.P, Axis::y, 1);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i + 1 < eg->nx(); ++i) {
        if (eg->x[i] < x_lo) continue;
        for (std::size_t j = 1; j + 1 < eg->ny(); ++j) {
            num = std::max({num, std::abs(Px(i, j) + Ex(i, j)), std::abs(PY(i, j) + EY(i, j))});
            den = std::max({den, std::abs(Ex(i, j)), std::abs(EY(i, j))});
        }
    }
    out.residual = den > 0.0 ? num / den : 0.0;
    return out;
}

}  // namespace

Cancellation aux_pressure_euler(int i, const std::vector<EulerLayer>& euler, double x_lo) {
    std::vector<std::pair<const EulerLayer*, const EulerLayer*>> pairs;
    const int n = int(euler.size()) - 1;
    for (int j = 1; j <= n; ++j) {
        int k = i + 1 - j;
        if (k >= 1 && k <= n) pairs.emplace_back(&euler[j], &euler[k]);
    }
    if (pairs.empty()) throw std::invalid_argument("aux_pressure_euler: missing Euler layers");
    return cancellation_pairs(pairs, pairs.front().first->u.grid, x_lo);
}

Cancellation cancellation_check(const Field2D& u, const Field2D& v, double x_lo) {
    EulerLayer tmp;
    tmp.u = u;
    tmp.v = v;
    return cancellation_pairs({{&tmp, &tmp}}, u.grid, x_lo);
}

LayerCoefficients layer_coefficients(const LayerSet& L, int i) {
    PartialSums s = partial_sums(L, i, i, i);
    LayerCoefficients c;
    c.a = map_field(L.up[0], [](double, double, double v) { return 1.0 + v; }, "1+u0p");
    c.A = diff(s.UP, Axis::x, 1) + diff(s.UE, Axis::x, 1);
    c.B = s.VP + s.VE;
    c.C = diff(L.up[0], Axis::y, 1);
    c.F = L.forcing[i];
    c.b.resize(L.grid->nx());
    for (std::size_t k = 0; k < c.b.size(); ++k) c.b[k] = -L.ue[i](k, 0);
    const double b1 = c.b[0];
    c.U = [b1](double y) { return b1 * std::exp(-y * y); };
    return c;
}

LayerSet build_layers(const Prandtl0Solution& p0, const GridPtr& physical, const LayerOptions& opt) {
    if (opt.n < 1) throw std::invalid_argument("build_layers: n must be >= 1");
    if (opt.Ui_spec != "gaussian") throw std::invalid_argument("unknown Ui spec: " + opt.Ui_spec);
    LayerSet L;
    L.epsilon = opt.epsilon;
    L.delta = p0.delta;
    L.n = opt.n;
    L.gamma = opt.gamma;
    L.grid = physical;
    L.egrid = euler_grid(physical, opt.epsilon);
    const int n = opt.n;
    for (int i = 0; i <= n; ++i) L.sigma.push_back(sigma_i(i, n));
    L.up.resize(n + 1);
    L.vp.resize(n + 1);
    L.euler.resize(n + 1);
    L.ue.resize(n + 1);
    L.ve.resize(n + 1);
    L.ppa.resize(n + 1);
    L.pae.resize(n + 1);
    L.pae_residual.assign(n + 1, 0.0);
    L.forcing.resize(n + 1);
    L.defect.resize(n + 1);
    L.up[0] = p0.u0p;
    L.vp[0] = p0.v0p;
    L.defect[0] = layer0_defect(p0.u0p, p0.v0p);
    const double eps = opt.epsilon;

    for (int i = 1; i <= n; ++i) {
        std::vector<double> trace(physical->nx());
        for (std::size_t k = 0; k < trace.size(); ++k) trace[k] = -L.vp[i - 1](k, 0);
        L.euler[i] = euler_layer(i, physical->x, trace, L.egrid, opt.tail_tol, opt.quad);
        for (auto& w : L.euler[i].warnings) L.warnings.push_back("euler " + std::to_string(i) + ": " + w);
        L.ue[i] = to_physical(L.euler[i].u, physical, eps);
        L.ve[i] = to_physical(L.euler[i].v, physical, eps);
        Cancellation ca = aux_pressure_euler(i, std::vector<EulerLayer>(L.euler.begin(), L.euler.begin() + i + 1));
        L.pae[i] = std::move(ca.P);
        L.pae_residual[i] = ca.residual;

        Field2D rv = structural_rv(partial_sums(L, i, i, i - 1), eps);
        L.ppa[i] = eps * cumulative_tail_y(rv, opt.tail_tol);
        L.ppa[i].name = "eps^((i+1)/2) P^{i,a}_p";
        for (auto& w : L.ppa[i].warnings) L.warnings.push_back("aux pressure " + std::to_string(i) + ": " + w);

        Field2D acc = structural_ru(partial_sums(L, i, i, i), eps) - L.defect[0];
        for (int j = 1; j < i; ++j) acc = acc - std::pow(eps, 0.5 * j) * L.defect[j];
        L.forcing[i] = -std::pow(eps, -0.5 * i) * acc;
        L.forcing[i].name = "f" + std::to_string(i);

        LayerCoefficients c = layer_coefficients(L, i);
        LayerSolution sol = solve_linear_layer(c, i == n, opt.tail_tol);
        for (auto& w : sol.v.warnings) L.warnings.push_back("layer " + std::to_string(i) + ": " + w);
        if (i < n) {
            L.up[i] = sol.u;
            L.vp[i] = sol.v;
            L.defect[i] = apply_layer_operator(c, sol.u, sol.v) - c.F;
        } else {
            L.up_pre = sol.u;
            L.vp_pre = sol.v;
            CutoffResult cut = cutoff_final_layer(sol.u, sol.v, c, eps, opt.tail_tol);
            for (auto& w : cut.u.warnings) L.warnings.push_back("cutoff: " + w);
            L.up[i] = cut.u;
            L.vp[i] = cut.v;
            L.cut_error = cut.error;
            L.cut_G = cut.G;
            L.defect[i] = apply_layer_operator(c, cut.u, cut.v) - c.F - cut.error;
        }
        L.up[i].name = "u" + std::to_string(i) + "_p";
        L.vp[i].name = "v" + std::to_string(i) + "_p";
    }
    return L;
}

NormReport layer_report(const LayerSet& L) {
    NormReport rep;
    const auto& xs = L.grid->x;
    const int n = L.n;
    auto zweighted_l2 = [&](const Field2D& f, int m) {
        if (m == 0) return column_l2(f);
        return column_l2(map_field(f, [m](double x, double y, double v) { return v * std::pow(y / std::sqrt(x), m); }));
    };
    for (int i = 1; i <= n; ++i) {
        const std::string k = std::to_string(i);
        double ftarget = i == 1 ? -1.25 : -(1.25 - 2.0 * L.sigma[i - 1]);
        add_slope_eq(rep, "||f" + k + "||_L2y", xs, column_l2(L.forcing[i]), ftarget, 0.1);
        for (int m = 1; m <= 2; ++m) {
            auto e = fit_entry("||z^" + std::to_string(m) + " f" + k + "||_L2y", xs, zweighted_l2(L.forcing[i], m));
            if (e) rep.slope_fits.push_back(*e);
        }
        add_slope_eq(rep, "||v" + k + "_p||_Linf_y", xs, column_sup(L.vp[i]), -(0.75 - L.sigma[i]), 0.07);
        Field2D Pax = (1.0 / L.epsilon) * diff(L.ppa[i], Axis::x, 1);
        add_slope_le(rep, "||d_x P^{" + k + ",a}_p||_L2y", xs, column_l2(Pax), -1.4);
        rep.add("aux_euler_cancellation_residual[" + k + "]", L.pae_residual[i]);
        double bc_u = 0.0, bc_v = 0.0;
        for (std::size_t x = 0; x < xs.size(); ++x) {
            bc_u = std::max(bc_u, std::abs(L.up[i](x, 0) + L.ue[i](x, 0)));
            bc_v = std::max(bc_v, std::abs(L.vp[i - 1](x, 0) + L.ve[i](x, 0)));
        }
        rep.add("bc_match_u[" + k + "]", bc_u);
        rep.add("bc_match_v[" + k + "]", bc_v);
        rep.add("max|P^{" + k + ",a}_p| at y_max", [&] {
            double m = 0.0;
            for (std::size_t x = 0; x < xs.size(); ++x) m = std::max(m, std::abs(L.ppa[i](x, L.grid->ny() - 1)));
            return m;
        }());
    }
    const double sn = L.sigma[n];
    add_slope_le(rep, "||E^(n)||_L2y", xs, column_l2(L.cut_error), -(1.25 - sn - 0.05) + 0.10);
    add_slope_le(rep, "sup_y|v^n_p|", xs, column_sup(L.vp[n]), -(1.0 - sn) + 0.1);
    add_slope_le(rep, "sup_y|d_y v^n_p|", xs, column_sup(diff(L.vp[n], Axis::y, 1)), -(1.5 - sn) + 0.1);
    add_slope_le(rep, "sup_y|u^n_p|", xs, column_sup(L.up[n]), -(0.5 - sn) + 0.1);
    add_slope_le(rep, "||u^n_p||_L2y", xs, column_l2(L.up[n]), -(0.25 - sn) + 0.1);
    add_slope_le(rep, "||d_y u^n_p||_L2y", xs, column_l2(diff(L.up[n], Axis::y, 1)), -(0.75 - sn) + 0.1);
    Field2D div = diff(L.up[n], Axis::x, 1) + diff(L.vp[n], Axis::y, 1);
    rep.add("max|div (u^n_p, v^n_p)|", div.max_abs());
    return rep;
}

}  // namespace pbl
