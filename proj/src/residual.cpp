#include "pbl/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbl/parallel.hpp"

namespace pbl {

CompositeFlow compose(const LayerSet& L) {
    const int n = L.n;
    const double eps = L.epsilon;
    PartialSums s = partial_sums(L, n + 1, n, n);
    CompositeFlow f;
    f.epsilon = eps;
    f.n = n;
    f.uP = s.UP.renamed("u^P_R");
    f.uE = map_field(s.UE, [](double, double, double v) { return 1.0 + v; }, "u^E_R");
    f.uPn1 = partial_sums(L, n, 0, 0).UP.renamed("u^{P,n-1}_R");
    f.vP = s.VP.renamed("v^P_R");
    f.vE = s.VE.renamed("v^E_R");
    f.us = (f.uP + f.uE).renamed("us");
    f.vs = (f.vP + f.vE).renamed("vs");
    f.Ps = s.PPa - s.UE - 0.5 * (s.UE * s.UE + eps * (s.VE * s.VE));
    f.Ps.name = "Ps";
    for (int i = 1; i <= n; ++i) {
        for (const auto& w : L.ue[i].warnings) f.warnings.push_back("u" + std::to_string(i) + "_e: " + w);
        for (const auto& w : L.ve[i].warnings) f.warnings.push_back("v" + std::to_string(i) + "_e: " + w);
    }
    return f;
}

Field2D ns_residual_u(const Field2D& us, const Field2D& vs, const Field2D& Ps, double eps) {
    Field2D ux = diff(us, Axis::x, 1), uy = diff(us, Axis::y, 1);
    Field2D uxx = diff(us, Axis::x, 2), uyy = diff(us, Axis::y, 2), Px = diff(Ps, Axis::x, 1);
    Field2D r(us.grid, Frame::physical_y, "Ru_direct");
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = -eps * uxx.values[k] - uyy.values[k] + us.values[k] * ux.values[k] +
                      vs.values[k] * uy.values[k] + Px.values[k];
    return r;
}

Field2D ns_residual_v(const Field2D& us, const Field2D& vs, const Field2D& Ps, double eps) {
    Field2D vx = diff(vs, Axis::x, 1), vy = diff(vs, Axis::y, 1);
    Field2D vxx = diff(vs, Axis::x, 2), vyy = diff(vs, Axis::y, 2), Py = diff(Ps, Axis::y, 1);
    Field2D r(vs.grid, Frame::physical_y, "Rv_direct");
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.values[k] = -eps * vxx.values[k] - vyy.values[k] + us.values[k] * vx.values[k] +
                      vs.values[k] * vy.values[k] + Py.values[k] / eps;
    return r;
}

LayerSet restrict_layers(const LayerSet& L, int stride) {
    LayerSet c = L;
    c.grid = subsample(L.grid, stride);
    auto r = [&](Field2D& f) {
        if (!f.values.empty()) f = restrict_field(f, c.grid, stride);
    };
    for (auto* v : {&c.up, &c.vp, &c.ue, &c.ve, &c.ppa, &c.forcing})
        for (auto& f : *v) r(f);
    r(c.up_pre);
    r(c.vp_pre);
    r(c.cut_G);
    c.euler.clear();
    c.pae.clear();
    c.defect.assign(L.n + 1, Field2D());
    c.defect[0] = layer0_defect(c.up[0], c.vp[0]);
    for (int i = 1; i <= L.n; ++i) {
        LayerCoefficients k = layer_coefficients(c, i);
        if (i < L.n) {
            c.defect[i] = apply_layer_operator(k, c.up[i], c.vp[i]) - k.F;
        } else {
            c.cut_error = cutoff_error(c.up_pre, c.vp_pre, c.cut_G, k, L.epsilon);
            c.defect[i] = apply_layer_operator(k, c.up[i], c.vp[i]) - k.F - c.cut_error;
        }
    }
    return c;
}

Field2D structural_remainder(const LayerSet& L) {
    const double eps = L.epsilon;
    Field2D R = structural_ru(partial_sums(L, L.n + 1, L.n, L.n), eps);
    for (int j = 0; j <= L.n; ++j) R = R - std::pow(eps, 0.5 * j) * L.defect[j];
    R.name = "R^{u,n}";
    return R;
}

RemainderFields remainder(const CompositeFlow& flow, const LayerSet& L, const RemainderOptions& opt) {
    RemainderFields out;
    out.epsilon = L.epsilon;
    out.n = L.n;
    out.gamma = L.gamma;
    out.Ru = structural_remainder(L);
    out.Rv = structural_rv(partial_sums(L, L.n + 1, L.n, L.n), L.epsilon);
    out.Rv.name = "R^{v,n}";
    out.Ru_direct = ns_residual_u(flow.us, flow.vs, flow.Ps, L.epsilon);
    out.Rv_direct = ns_residual_v(flow.us, flow.vs, flow.Ps, L.epsilon);
    out.Ru.require_finite();
    out.Rv.require_finite();
    if (!opt.two_grid) return out;

    LayerSet coarse = restrict_layers(L, 2);
    Field2D Rc = structural_remainder(coarse);
    Field2D Rf = restrict_field(out.Ru, coarse.grid, 2);
    auto fine = column_l2(Rf), dif = column_l2(Rf - Rc);
    TwoGridCheck& t = out.two_grid;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const double x = coarse.grid->x[i];
        if (x < opt.x_lo || x > opt.x_hi) continue;
        t.x.push_back(x);
        t.fine.push_back(fine[i]);
        t.difference.push_back(dif[i]);
        ++t.stations;
        if (fine[i] > opt.factor * dif[i]) ++t.valid;
    }
    t.pass = t.valid >= opt.min_valid;
    if (!t.pass) {
        std::ostringstream os;
        os << "remainder: two-grid check failed (" << t.valid << " of " << t.stations
           << " stations have |R| > " << opt.factor << " |R_h - R_2h|); refine the grid";
        throw RefinementError(os.str());
    }
    return out;
}

double weighted_window_sup(std::span<const double> x, std::span<const double> g, double rate, double x_lo,
                           double x_hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= x_lo && x[i] <= x_hi) m = std::max(m, std::pow(x[i], rate) * std::abs(g[i]));
    return m;
}

ScalingMember scaling_member(const LayerSet& L, const ScalingOptions& opt, const RemainderOptions& ropt) {
    ScalingMember m;
    m.epsilon = L.epsilon;
    CompositeFlow flow = compose(L);
    RemainderFields R = remainder(flow, L, ropt);
    m.x = L.grid->x;
    const double scale = std::pow(L.epsilon, -0.5 * opt.n - opt.gamma) * std::sqrt(L.epsilon);
    m.remainder_l2 = column_l2(R.Ru);
    for (double& v : m.remainder_l2) v *= scale;
    m.cutoff_l2 = column_l2(L.cut_error);
    add_slope_le(m.report, "||sqrt(eps) R^{u,n}||_L2y", m.x, m.remainder_l2,
                 -(1.25 - 2.0 * opt.sigma_n - opt.kappa) + opt.remainder_slope_slack);
    add_slope_le(m.report, "||E^(n)||_L2y", m.x, m.cutoff_l2, -(1.25 - opt.sigma_n - opt.kappa) + opt.cutoff_slope_slack);
    m.report.add("two_grid_valid_stations", R.two_grid.valid);
    m.ok = true;
    return m;
}

NormReport epsilon_exponents(const std::vector<ScalingMember>& members, const ScalingOptions& opt) {
    NormReport rep;
    std::vector<double> eps, cr, ce;
    const double rate_r = 1.25 - 2.0 * opt.sigma_n - opt.kappa;
    const double rate_e = 1.25 - opt.sigma_n - opt.kappa;
    for (const auto& m : members) {
        if (!m.ok) {
            rep.flags.push_back({"member eps=" + fmt17(m.epsilon), false, m.error});
            continue;
        }
        eps.push_back(m.epsilon);
        cr.push_back(weighted_window_sup(m.x, m.remainder_l2, rate_r));
        ce.push_back(weighted_window_sup(m.x, m.cutoff_l2, rate_e));
    }
    auto fit = [&](const std::string& q, const std::vector<double>& c, double bound) {
        bool usable = eps.size() >= 2 && std::all_of(c.begin(), c.end(), [](double v) { return v > 0.0; });
        if (!usable) {
            rep.flags.push_back({"eps-exponent of " + q, false, "degenerate"});
            return;
        }
        for (std::size_t i = 0; i < eps.size(); ++i) rep.add("C(eps=" + fmt17(eps[i]) + ") " + q, c[i], "sup_x x^rate");
        SlopeEntry e;
        e.quantity = "eps-exponent of " + q;
        e.x_lo = *std::min_element(eps.begin(), eps.end());
        e.x_hi = *std::max_element(eps.begin(), eps.end());
        e.fit = decay_fit(eps, c, 0.0, std::numeric_limits<double>::infinity(), 2);
        std::ostringstream os;
        os << ">= " << bound;
        e.target = os.str();
        e.pass = e.fit.slope >= bound;
        rep.slope_fits.push_back(e);
    };
    fit("eps^{-n/2-gamma} ||sqrt(eps) R^{u,n}||_L2y", cr, opt.p_remainder_min);
    fit("||E^(n)||_L2y", ce, opt.p_cutoff_min);
    return rep;
}

NormReport scaling_study(const std::function<LayerSet(double)>& factory, const std::vector<double>& eps_list,
                         const ScalingOptions& opt, std::vector<ScalingMember>* members_out,
                         const RemainderOptions& ropt) {
    if (eps_list.size() < 3) throw std::invalid_argument("scaling_study: need at least 3 values of eps");
    auto [lo, hi] = std::minmax_element(eps_list.begin(), eps_list.end());
    if (!(*lo > 0.0) || *hi / *lo < 10.0 * (1.0 - 1e-12))
        throw std::invalid_argument("scaling_study: eps values must be positive and span a decade");
    std::vector<ScalingMember> members(eps_list.size());
    parallel_for(eps_list.size(), [&](std::size_t k) {
        try {
            members[k] = scaling_member(factory(eps_list[k]), opt, ropt);
        } catch (const std::exception& e) {
            members[k].epsilon = eps_list[k];
            members[k].ok = false;
            members[k].error = e.what();
        }
    });
    NormReport rep = epsilon_exponents(members, opt);
    for (const auto& m : members)
        for (const auto& s : m.report.slope_fits) {
            SlopeEntry e = s;
            e.quantity += " [eps=" + fmt17(m.epsilon) + "]";
            rep.slope_fits.push_back(e);
        }
    if (members_out) *members_out = std::move(members);
    return rep;
}

namespace {

struct Bound {
    std::string name;
    std::vector<double> g;  // weighted column sup
    const std::vector<double>* x;
    bool tagged = false;
};

Field2D d(const Field2D& f, int k, int j) {
    if (k > 2) return d(diff(f, Axis::x, 2), k - 2, j);
    Field2D r = k ? diff(f, Axis::x, k) : f;
    return j ? diff(r, Axis::y, j) : r;
}

std::string idx(const char* label, std::initializer_list<std::pair<const char*, int>> ks) {
    std::string s = label;
    for (auto [n, v] : ks) s += std::string(" ") + n + "=" + std::to_string(v);
    return s;
}

std::vector<Bound> bound_battery(const CompositeFlow& f, const LayerSet& L) {
    std::vector<Bound> out;
    const auto& xs = L.grid->x;
    const double sn = L.sigma.empty() ? 0.0 : L.sigma.back();
    auto zw = [](double xpow, int m, int ypow = 0) {
        return [=](double x, double y) {
            return std::pow(x, xpow) * std::pow(y / std::sqrt(x), m) * std::pow(y, ypow);
        };
    };
    auto add = [&](std::string name, const Field2D& q, const std::function<double(double, double)>& w, bool tag) {
        out.push_back({std::move(name), column_weighted_sup(q, w), &xs, tag});
    };
    for (int m = 0; m <= 2; ++m) {
        for (int k = 1; k <= 2; ++k)
            for (int j = 0; j <= 2; ++j)
                add(idx("vP.xderiv v^P_R", {{"k", k}, {"j", j}, {"m", m}}), d(f.vP, k, j), zw(k + 0.5 * j + 0.5, m), false);
        add(idx("vP.yy v^P_R", {{"j", 2}, {"m", m}}), d(f.vP, 0, 2), zw(1.5, m), false);
        for (int j = 0; j <= 1; ++j)
            add(idx("vP.size v^P_R", {{"j", j}, {"m", m}}), d(f.vP, 0, j), zw(0.5 * j + 0.5, m), true);
        for (int j = 0; j <= 2; ++j)
            add(idx("uP.xx u^P_R", {{"k", 2}, {"j", j}, {"m", m}}), d(f.uP, 2, j), zw(2 + 0.5 * j, m), false);
        add(idx("uP.x u^P_R", {{"m", m}}), d(f.uP, 1, 0), zw(1.0, m), true);
        for (int j = 1; j <= 2; ++j)
            add(idx("uP.xy u^P_R", {{"j", j}, {"m", m}}), d(f.uP, 1, j), zw(1.0, m), false);
        for (int j = 0; j <= 2; ++j)
            add(idx("uPn1.yweight u^{P,n-1}_R", {{"j", j}, {"m", m}}), d(f.uPn1, 0, j), zw(0.0, m, j), true);
    }
    if (L.n >= 1) {
        for (int j = 0; j <= 2; ++j)
            add(idx("unp.yweight u^n_p", {{"j", j}}), d(L.up[L.n], 0, j), zw(0.5 - sn, 0, j), false);
    }

    // Euler splits on their own grid. Each layer is a CR pair, so with
    // U = (u^E_R - 1)/sqrt(eps) and V = v^E_R: U_Y = V_x, V_Y = -U_x. Y-derivatives
    // are taken through x, since differencing across the near-wall Euler nodes
    // amplifies quadrature noise.
    if (L.n >= 1 && !L.euler.empty() && !L.euler[1].v.values.empty()) {
        const double eps = L.epsilon, se = std::sqrt(eps);
        Field2D V(L.egrid, Frame::euler_Y, "v^E_R"), U(L.egrid, Frame::euler_Y, "U");
        for (int j = 1; j <= L.n; ++j) {
            V += std::pow(eps, 0.5 * (j - 1)) * L.euler[j].v;
            U += std::pow(eps, 0.5 * (j - 1)) * L.euler[j].u;
        }
        // d_x^k d_Y^j of U (which = 0) or V (which = 1)
        auto dY = [&](int which, int k, int j) {
            int w = which;
            double sign = 1.0;
            for (int t = 0; t < j; ++t) {
                if (w == 1) sign = -sign;  // V_Y = -U_x
                w = 1 - w;
            }
            Field2D base = w == 0 ? U : V;
            return sign * d(base, k + j, 0);
        };
        const auto& ex = L.egrid->x;
        auto xw = [](double p, bool withY = false) {
            return [=](double x, double Y) { return std::pow(x, p) * (withY ? Y : 1.0); };
        };
        auto adde = [&](std::string name, const Field2D& q, const std::function<double(double, double)>& w, bool tag) {
            out.push_back({std::move(name), column_weighted_sup(q, w), &ex, tag});
        };
        for (int k = 0; k <= 2; ++k)
            for (int j = 0; j <= 2; ++j) {
                if (k + j == 0) continue;
                adde(idx("vE.deriv v^E_R", {{"k", k}, {"j", j}}), dY(1, k, j), xw(k + j + 0.5), false);
                adde(idx("uE.deriv u^E_R", {{"k", k}, {"j", j}}), se * dY(0, k, j), xw(k + j + 0.5), false);
            }
        for (int k = 1; k <= 2; ++k) adde(idx("vE.Yweight v^E_R", {{"k", k}}), dY(1, k, 0), xw(k - 0.5, true), false);
        adde("E.size u^E_R - 1", se * U, xw(0.5), true);
        adde("E.size v^E_R", V, xw(0.5), true);
        adde("E.size v^E_RY", dY(1, 0, 1), xw(1.5), true);
    }
    return out;
}

}  // namespace

NormReport profile_bounds(const CompositeFlow& flow, const LayerSet& L) {
    NormReport rep;
    for (const auto& b : bound_battery(flow, L)) add_slope_le(rep, b.name, *b.x, b.g, 0.1);
    return rep;
}

std::map<std::string, double> delta_tagged(const CompositeFlow& flow, const LayerSet& L) {
    std::map<std::string, double> out;
    for (const auto& b : bound_battery(flow, L))
        if (b.tagged) out[b.name] = weighted_window_sup(*b.x, b.g, 0.0);
    return out;
}

NormReport delta_linearity(const std::map<std::string, double>& big, const std::map<std::string, double>& small,
                           const std::vector<std::string>& assert_prefixes, double lo, double hi) {
    NormReport rep;
    for (const auto& [name, vb] : big) {
        auto it = small.find(name);
        if (it == small.end()) continue;
        const double factor = it->second > 0.0 ? vb / it->second : std::numeric_limits<double>::infinity();
        rep.add("shrink " + name, factor, "window sup ratio");
        bool asserted = std::any_of(assert_prefixes.begin(), assert_prefixes.end(),
                                    [&](const std::string& p) { return name.rfind(p, 0) == 0; });
        if (!asserted) continue;
        std::ostringstream os;
        os << "factor " << factor << " in [" << lo << ", " << hi << "]";
        rep.flags.push_back({"delta-linearity " + name, factor >= lo && factor <= hi, os.str()});
    }
    return rep;
}

}  // namespace pbl
