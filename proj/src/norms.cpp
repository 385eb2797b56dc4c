#include "pbl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "pbl/smooth.hpp"

namespace pbl {

DecayFit decay_fit(std::span<const double> x, std::span<const double> g, double x_lo, double x_hi,
                   std::size_t min_points) {
    std::vector<double> lx, lg;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < x_lo || x[i] > x_hi) continue;
        if (!(g[i] > 0.0) || !std::isfinite(g[i])) {
            std::ostringstream os;
            os << "decay_fit: nonpositive sample " << g[i] << " at x = " << x[i];
            throw std::domain_error(os.str());
        }
        lx.push_back(std::log(x[i]));
        lg.push_back(std::log(g[i]));
    }
    const std::size_t n = lx.size();
    if (n < std::max<std::size_t>(min_points, 2)) throw std::domain_error("decay_fit: too few samples in window");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += lg[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (lg[i] - my);
    }
    DecayFit f;
    f.n_points = int(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = lg[i] - (f.intercept + f.slope * lx[i]);
        rss += r * r;
    }
    if (n > 2) {
        double se = std::sqrt(rss / double(n - 2) / sxx);
        boost::math::students_t dist(double(n - 2));
        f.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
    } else {
        f.ci95 = std::numeric_limits<double>::infinity();
    }
    f.non_power_law = 2.0 * f.ci95 > 0.5;
    return f;
}

void NormReport::add(std::string name, double value, std::string weight, double x_lo, double x_hi) {
    entries.push_back({std::move(name), value, std::move(weight), x_lo, x_hi});
}

const NormEntry* NormReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

double NormReport::value(const std::string& name) const {
    const NormEntry* e = find(name);
    if (!e) throw std::out_of_range("no report entry " + name);
    return e->value;
}

json NormReport::slopes_json() const {
    json arr = json::array();
    for (const auto& s : slope_fits) {
        json j = {{"quantity", s.quantity},
                  {"window", {s.x_lo, s.x_hi}},
                  {"slope", s.fit.slope},
                  {"ci95", s.fit.ci95},
                  {"n_points", s.fit.n_points},
                  {"non_power_law", s.fit.non_power_law},
                  {"target", s.target}};
        j["pass"] = s.pass ? json(*s.pass) : json(nullptr);
        arr.push_back(j);
    }
    return arr;
}

json NormReport::to_json() const {
    json e = json::array();
    for (const auto& x : entries)
        e.push_back({{"name", x.name}, {"value", x.value}, {"weight_spec", x.weight_spec},
                     {"window", {x.x_lo, x.x_hi}}});
    json f = json::array();
    for (const auto& x : flags) f.push_back({{"check", x.check}, {"pass", x.pass}, {"detail", x.detail}});
    return {{"entries", e}, {"slopes", slopes_json()}, {"flags", f}};
}

std::string NormReport::to_csv() const {
    std::string s = "name,value\n";
    for (const auto& e : entries) s += e.name + "," + fmt17(e.value) + "\n";
    for (const auto& f : slope_fits) s += "slope:" + f.quantity + "," + fmt17(f.fit.slope) + "\n";
    return s;
}

std::optional<SlopeEntry> fit_entry(std::string quantity, std::span<const double> x, std::span<const double> g,
                                    double x_lo, double x_hi) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= x_lo && x[i] <= x_hi && !(g[i] > 0.0 && std::isfinite(g[i]))) return std::nullopt;
    SlopeEntry e;
    e.quantity = std::move(quantity);
    e.x_lo = x_lo;
    e.x_hi = x_hi;
    e.fit = decay_fit(x, g, x_lo, x_hi);
    return e;
}

void add_slope_eq(NormReport& r, std::string quantity, std::span<const double> x, std::span<const double> g,
                  double target, double tol) {
    auto e = fit_entry(quantity, x, g);
    if (!e) {
        r.flags.push_back({"slope of " + quantity, false, "degenerate: nonpositive samples in window"});
        return;
    }
    std::ostringstream os;
    os << "= " << target << " +/- " << tol;
    e->target = os.str();
    e->pass = std::abs(e->fit.slope - target) <= tol;
    r.slope_fits.push_back(*e);
}

void add_slope_le(NormReport& r, std::string quantity, std::span<const double> x, std::span<const double> g,
                  double bound) {
    auto e = fit_entry(quantity, x, g);
    if (!e) {
        r.flags.push_back({"slope of " + quantity, false, "degenerate: nonpositive samples in window"});
        return;
    }
    std::ostringstream os;
    os << "<= " << bound;
    e->target = os.str();
    e->pass = e->fit.slope <= bound;
    r.slope_fits.push_back(*e);
}

std::vector<double> column_sup(const Field2D& f) {
    std::vector<double> r(f.nx());
    for (std::size_t i = 0; i < f.nx(); ++i) r[i] = f.column_max_abs(i);
    return r;
}

std::vector<double> column_l2(const Field2D& f) {
    std::vector<double> r(f.nx());
    for (std::size_t i = 0; i < f.nx(); ++i) {
        std::vector<double> sq(f.ny());
        auto c = f.column(i);
        for (std::size_t j = 0; j < f.ny(); ++j) sq[j] = c[j] * c[j];
        r[i] = std::sqrt(std::max(0.0, quad_line(f.grid->y, sq, f.grid->stencil_order)));
    }
    return r;
}

std::vector<double> column_weighted_sup(const Field2D& f, const std::function<double(double, double)>& w) {
    std::vector<double> r(f.nx(), 0.0);
    for (std::size_t i = 0; i < f.nx(); ++i)
        for (std::size_t j = 0; j < f.ny(); ++j)
            r[i] = std::max(r[i], std::abs(f(i, j) * w(f.x(i), f.y(j))));
    return r;
}

namespace {

Field2D dx_k(const Field2D& f, int k) { return k == 0 ? f : diff(f, Axis::x, k); }

// integral over y of sum_t terms[t]^2 * weight(x, y) for each column
std::vector<double> column_energy(const std::vector<const Field2D*>& terms,
                                  const std::vector<std::function<double(double, double)>>& weights) {
    const Field2D& f0 = *terms[0];
    std::vector<double> r(f0.nx());
    std::vector<double> g(f0.ny());
    for (std::size_t i = 0; i < f0.nx(); ++i) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t t = 0; t < terms.size(); ++t)
            for (std::size_t j = 0; j < f0.ny(); ++j) {
                double v = (*terms[t])(i, j);
                g[j] += v * v * weights[t](f0.x(i), f0.y(j));
            }
        r[i] = quad_line(f0.grid->y, g, f0.grid->stencil_order);
    }
    return r;
}

double integrate_x(const Field2D& f0, const std::vector<double>& col, double x_hi = 1e300) {
    std::vector<double> xs, vs;
    for (std::size_t i = 0; i < f0.nx(); ++i) {
        if (f0.x(i) > x_hi) break;
        xs.push_back(f0.x(i));
        vs.push_back(col[i]);
    }
    return xs.size() < 2 ? 0.0 : quad_line(xs, vs, f0.grid->stencil_order);
}

}  // namespace

double q_norm(const Field2D& w, double sigma0, int k, int m) {
    if (k < 0 || k > 2) throw std::invalid_argument("q_norm: k must be 0..2");
    Field2D d0 = dx_k(w, k);
    Field2D d1 = diff(d0, Axis::y, 1);
    Field2D d2 = diff(d0, Axis::y, 2);
    Field2D d3 = diff(d0, Axis::y, 3);
    auto zw = [m](double x, double eta) { return m == 0 ? 1.0 : std::pow(eta / std::sqrt(x), 2 * m); };
    auto pw = [&](double p) {
        return [=](double x, double eta) { return std::pow(x, p) * zw(x, eta); };
    };
    double a = 2.0 * k - 2.0 * sigma0;
    auto sup_part = column_energy({&d0, &d1, &d2}, {pw(a), pw(a + 1), pw(a + 2)});
    auto int_part = column_energy({&d1, &d2, &d3}, {pw(a), pw(a + 1), pw(a + 2)});
    double s = *std::max_element(sup_part.begin(), sup_part.end());
    return std::sqrt(std::max(0.0, s + integrate_x(w, int_part)));
}

double p_norm(const Field2D& u, double sigma, int k, double x1, int m) {
    if (k < 0 || k > 2) throw std::invalid_argument("p_norm: k must be 0..2");
    Field2D d0 = dx_k(u, k);
    Field2D dy = diff(d0, Axis::y, 1);
    Field2D dk1 = diff(u, Axis::x, k + 1);
    auto zw = [m](double x, double y) { return m == 0 ? 1.0 : std::pow(y / std::sqrt(x), 2 * m); };
    auto pw = [&](double p) {
        return [=](double x, double y) { return std::pow(x, p) * zw(x, y); };
    };
    double a = 2.0 * k - 2.0 * sigma;
    auto sup_part = column_energy({&d0, &dy}, {pw(a), pw(a + 1)});
    auto int_part = column_energy({&d0, &dy, &dk1}, {pw(a - 1), pw(a), pw(a + 1)});
    double s = 0.0;
    for (std::size_t i = 0; i < u.nx() && u.x(i) <= x1; ++i) s = std::max(s, sup_part[i]);
    return std::sqrt(std::max(0.0, s + integrate_x(u, int_part, x1)));
}

double zeta3(double x) { return smooth_step((x - 1.5) / 0.5); }

double rho(int k, double x) {
    double a = 50.0 + 50.0 * (k - 2);
    return smooth_step((x - a) / 10.0);
}

NormReport z_norm(const Field2D& u, const Field2D& v, double eps, const ZParams& p) {
    NormReport rep;
    Field2D ux = diff(u, Axis::x, 1), uy = diff(u, Axis::y, 1), uyy = diff(u, Axis::y, 2);
    Field2D uxy = diff(uy, Axis::x, 1), uxxy = diff(uy, Axis::x, 2);
    Field2D vx = diff(v, Axis::x, 1), vy = diff(v, Axis::y, 1), vxx = diff(v, Axis::x, 2);
    Field2D vxy = diff(vy, Axis::x, 1), vxxx = diff(v, Axis::x, 3), vxxy = diff(vy, Axis::x, 2);
    Field2D svx = std::sqrt(eps) * vx, svxx = std::sqrt(eps) * vxx, svxxx = std::sqrt(eps) * vxxx;

    auto one = [](double, double) { return 1.0; };
    auto xp = [](double e) { return [=](double x, double) { return std::pow(x, e); }; };
    auto rx = [](int k, double e) { return [=](double x, double) { return std::pow(rho(k, x) * x, e); }; };
    auto zx = [](double e) {
        return [=](double x, double) { return zeta3(x) * zeta3(x) * std::pow(x, e); };
    };

    double X1 = integrate_x(u, column_energy({&uy, &svx, &vy}, {one, xp(1), xp(1)}));
    double X2 = integrate_x(u, column_energy({&uxy, &svxx, &vxy}, {rx(2, 2), rx(2, 3), rx(2, 3)}));
    double X3 = integrate_x(u, column_energy({&uxxy, &svxxx, &vxxy}, {rx(3, 4), rx(3, 5), rx(3, 5)}));
    double Y2 = integrate_x(u, column_energy({&uxy, &svxx, &vxy}, {xp(2), xp(3), xp(3)})) +
                integrate_x(u, column_energy({&uyy}, {one}), 2000.0);
    double Y3 = integrate_x(u, column_energy({&uxxy, &svxxx, &vxxy}, {zx(4), zx(5), zx(5)}));
    X1 = std::sqrt(X1);
    X2 = std::sqrt(X2);
    X3 = std::sqrt(X3);
    Y2 = std::sqrt(Y2);
    Y3 = std::sqrt(Y3);

    double U1 = 0, U2 = 0, U3 = 0;
    std::vector<double> u4(u.nx(), 0.0);
    auto uy2 = column_energy({&uy}, {one});
    for (std::size_t i = 0; i < u.nx(); ++i) {
        double x = u.x(i);
        double c4 = 0.0;
        for (std::size_t j = 0; j < u.ny(); ++j) {
            U1 = std::max({U1, std::abs(u(i, j)) * std::pow(x, 0.25), std::sqrt(eps) * std::abs(v(i, j)) * std::sqrt(x)});
            if (x >= 20.0) {
                U2 = std::max({U2, std::abs(svx(i, j)) * std::pow(x, 1.5), std::abs(ux(i, j)) * std::pow(x, 1.25)});
                c4 = std::max(c4, std::abs(svxx(i, j)));
            }
        }
        if (x >= 20.0) U3 = std::max(U3, std::sqrt(x * std::max(0.0, uy2[i])));
        u4[i] = x >= 20.0 ? std::pow(x, 4) * c4 * c4 : 0.0;
    }
    double U4 = std::sqrt(integrate_x(u, u4));

    double Xcap = std::sqrt(X1 * X1 + X2 * X2 + X3 * X3);
    double U = std::pow(eps, p.N[4]) * U1 + std::pow(eps, p.N[5]) * U2 + std::pow(eps, p.N[6]) * U3 +
               std::pow(eps, p.N[7]) * U4;
    double Z = Xcap + std::pow(eps, p.N[2]) * Y2 + std::pow(eps, p.N[3]) * Y3 + U;
    rep.add("X1", X1, "u_y; {sqrt(eps) v_x, v_y} x^1/2");
    rep.add("X2", X2, "u_xy rho2 x; {sqrt(eps) v_xx, v_xy} (rho2 x)^3/2");
    rep.add("X3", X3, "u_xxy (rho3 x)^2; {sqrt(eps) v_xxx, v_xxy} (rho3 x)^5/2");
    rep.add("X1^X2^X3", Xcap, "hilbertian sum");
    rep.add("Y2", Y2, "u_xy x; {sqrt(eps) v_xx, v_xy} x^3/2; u_yy on x<=2000");
    rep.add("Y3", Y3, "zeta3 weighted third derivatives");
    rep.add("U1", U1, "u x^1/4, sqrt(eps) v x^1/2 sup");
    rep.add("U2", U2, "x>=20: sqrt(eps) v_x x^3/2, u_x x^5/4 sup");
    rep.add("U3", U3, "x>=20: x^1/2 ||u_y||_L2y");
    rep.add("U4", U4, "[int_20 x^4 ||sqrt(eps) v_xx||^2_Linf]^1/2");
    rep.add("U", U, "eps^N weighted");
    rep.add("Z", Z, "eps^N weighted");
    return rep;
}

double hardy_check(std::span<const double> y, std::span<const double> u, int order) {
    if (y.empty() || y[0] != 0.0 || std::abs(u[0]) > 1e-12) throw std::invalid_argument("hardy_check: need u(0) = 0 at y = 0");
    std::vector<double> uy = diff_line(y, u, 1, order);
    std::vector<double> a(y.size()), b(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        double q = j == 0 ? uy[0] : u[j] / y[j];
        a[j] = q * q;
        b[j] = uy[j] * uy[j];
    }
    double den = quad_line(y, b, order);
    if (!(den > 0.0)) throw std::domain_error("hardy_check: zero denominator");
    return std::sqrt(quad_line(y, a, order) / den);
}

}  // namespace pbl
