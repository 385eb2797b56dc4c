#include "pbl/checks.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbl/euler.hpp"
#include "pbl/front.hpp"
#include "pbl/grid.hpp"

namespace pbl {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// int_0^X P_Y(x) dx on geometric panels, GK15 per panel
double half_mass(double Y, double X) {
    using boost::math::quadrature::gauss_kronrod;
    auto P = [Y](double x) { return poisson_kernel(x, Y, 0); };
    double sum = gauss_kronrod<double, 15>::integrate(P, 0.0, Y, 0, 0.0);
    for (double a = Y; a < X; a *= 2.0) sum += gauss_kronrod<double, 15>::integrate(P, a, std::min(2.0 * a, X), 0, 0.0);
    return sum;
}

}  // namespace

void SuiteResult::check(std::string what, bool ok, std::string detail) {
    checks.push_back({std::move(what), ok, std::move(detail)});
    pass = pass && ok;
}

json SuiteResult::to_json() const {
    json c = json::array();
    for (const auto& f : checks) c.push_back({{"check", f.check}, {"pass", f.pass}, {"detail", f.detail}});
    return {{"suite", name}, {"pass", pass}, {"runtime_s", runtime}, {"checks", c}, {"metrics", metrics}};
}

SuiteResult check_kernel(std::uint64_t seed, int samples, double tol) {
    auto t0 = clock_type::now();
    SuiteResult r;
    r.name = "kernel";

    double worst_mass = 0.0;
    for (double Y : {1e-3, 1.0, 1e3}) worst_mass = std::max(worst_mass, std::abs(2.0 * half_mass(Y, 1e6 * Y) - 1.0));
    r.metrics["unit_mass_error"] = worst_mass;
    r.check("unit mass over |x| <= 1e6 Y", worst_mass <= tol, num(worst_mass));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lg(-1.0, 1.0), xs(-5.0, 5.0);
    double worst_semi = 0.0;
    for (int s = 0; s < 12; ++s) {
        const double Y1 = std::pow(10.0, lg(rng)), Y2 = std::pow(10.0, lg(rng)), x = xs(rng);
        std::vector<double> breaks = {0.0};
        for (double b = Y2 / 8.0; b < 1e8 * Y2; b *= 2.0) {
            breaks.push_back(b);
            breaks.push_back(-b);
        }
        TraceFunction f = line_trace([Y2](double t) { return poisson_kernel(t, Y2, 0); }, breaks);
        const double lhs = poisson_integral(f, x, Y1);
        const double rhs = poisson_kernel(x, Y1 + Y2, 0);
        worst_semi = std::max(worst_semi, std::abs(lhs - rhs) / poisson_kernel(0.0, Y1 + Y2, 0));
    }
    r.metrics["semigroup_error"] = worst_semi;
    r.check("P_Y1 * P_Y2 = P_(Y1+Y2)", worst_semi <= tol, num(worst_semi));

    std::uniform_real_distribution<double> u(0.0, 1e3);
    std::uniform_int_distribution<int> kd(0, 3);
    double worst_ratio = 0.0;
    for (int s = 0; s < samples; ++s) {
        double x = u(rng), Y = u(rng);
        if (!(x > 0.0 && Y > 0.0)) continue;
        int k = kd(rng);
        int sp = std::uniform_int_distribution<int>(0, k)(rng);
        double v = std::abs(std::pow(x, sp + 1) * std::pow(Y, k - sp) * poisson_kernel(x, Y, k));
        worst_ratio = std::max(worst_ratio, v / kKernelBound[k][sp]);
    }
    r.metrics["pointwise_bound_worst_ratio"] = worst_ratio;
    r.check("pointwise kernel bounds on " + std::to_string(samples) + " samples", worst_ratio <= 1.0, num(worst_ratio));
    r.runtime = seconds_since(t0);
    return r;
}

SuiteResult check_hardy(std::uint64_t seed, int samples, double slack) {
    auto t0 = clock_type::now();
    SuiteResult r;
    r.name = "hardy";
    GridPtr g = make_grid(10.0, 8, 400.0, 1200, StretchLaw::geometric(1.008), 4);
    const auto& y = g->y;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), rate(0.2, 4.0), decay(0.05, 2.0), freq(0.0, 3.0);
    std::vector<double> col(y.size());
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        double a[3], b[3], c[3], w = freq(rng);
        for (int k = 0; k < 3; ++k) {
            a[k] = amp(rng);
            b[k] = rate(rng);
            c[k] = decay(rng);
        }
        for (std::size_t j = 0; j < y.size(); ++j) {
            double v = 0.0;
            for (int k = 0; k < 3; ++k) v += a[k] * (1.0 - std::exp(-b[k] * y[j])) * std::exp(-c[k] * y[j]);
            col[j] = v * (1.0 + 0.3 * std::sin(w * y[j]));
        }
        worst = std::max(worst, hardy_check(y, col));
    }
    r.metrics["worst_ratio"] = worst;
    r.check("ratio <= 2 on " + std::to_string(samples) + " random columns", worst <= 2.0 + slack, num(worst));

    for (std::size_t j = 0; j < y.size(); ++j) col[j] = y[j] * std::exp(-y[j]);
    double ye = hardy_check(y, col);
    r.metrics["y_exp_ratio"] = ye;
    r.check("u = y e^{-y} gives sqrt 2", std::abs(ye - std::sqrt(2.0)) <= 1e-4, num(ye));
    r.runtime = seconds_since(t0);
    return r;
}

SuiteResult check_front(const std::vector<double>& deltas, double residual_tol, double bc_tol, double runtime_limit) {
    auto t0 = clock_type::now();
    SuiteResult r;
    r.name = "front";
    for (double d : deltas) {
        auto t1 = clock_type::now();
        FrontProfile f = solve_front(d);
        double dt = seconds_since(t1);
        double psi = 0.0;
        for (double p : f.psi) psi = std::max(psi, std::abs(p));
        const std::string tag = " (delta=" + num(d) + ")";
        const double bc = std::abs(f.phi_star.back() - d);
        r.check("ODE residual" + tag, f.residual <= residual_tol, num(f.residual));
        r.check("far-field value" + tag, bc <= bc_tol, num(bc));
        r.check("phi*'(0) > 0" + tag, f.dphi0 > 0.0, num(f.dphi0));
        r.check("max|psi| <= delta" + tag, psi <= d, num(psi));
        r.check("runtime < " + num(runtime_limit) + " s" + tag, dt < runtime_limit, num(dt));
        r.metrics[num(d)] = {{"residual", f.residual}, {"bc", bc}, {"dphi0", f.dphi0}, {"max_psi", psi}, {"runtime_s", dt}};
    }
    r.runtime = seconds_since(t0);
    return r;
}

SuiteResult check_norms(std::uint64_t seed, double rel_tol) {
    auto t0 = clock_type::now();
    SuiteResult r;
    r.name = "norms";
    std::mt19937_64 rng(seed);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };

    const double xm = 100.0, ym = 30.0;
    GridPtr g = make_grid(xm, 96, ym, 96, StretchLaw::geometric(1.04), 2);
    GridPtr dense = make_grid(xm, 4 * 96 - 3, ym, 4 * 96 - 3, StretchLaw::geometric(std::pow(1.04, 0.25)), 2);
    auto model = [](double x, double y) { return std::exp(-y) / x; };
    Field2D w = sample_field(g, Frame::von_mises_eta, "w", model);
    Field2D wd = sample_field(dense, Frame::von_mises_eta, "w", model);
    Field2D zero(g, Frame::physical_y, "0");

    // homogeneity
    const double c = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    Field2D cw = c * w;
    double h = std::max({rel(q_norm(cw, 0.1, 1, 1), std::abs(c) * q_norm(w, 0.1, 1, 1)),
                         rel(p_norm(cw, 0.1, 1, xm, 1), std::abs(c) * p_norm(w, 0.1, 1, xm, 1)),
                         rel(z_norm(cw, cw, 0.01, {}).value("Z"), std::abs(c) * z_norm(w, w, 0.01, {}).value("Z"))});
    r.check("homogeneity", h <= 1e-12, num(h));

    // degeneracy
    double zsum = q_norm(zero, 0.0, 0, 0) + p_norm(zero, 0.0, 0, xm) + z_norm(zero, zero, 0.01, {}).value("Z");
    r.check("zero field gives zero", zsum == 0.0, num(zsum));
    NormReport zr = z_norm(w, w, 1.0, {});
    double parts = zr.value("X1^X2^X3") + zr.value("Y2") + zr.value("Y3") + zr.value("U1") + zr.value("U2") +
                   zr.value("U3") + zr.value("U4");
    double zd = rel(zr.value("Z"), parts);
    r.check("Z with N = 0, eps = 1 is the plain sum", zd <= 1e-12, num(zd));

    // dense-grid oracles
    double qd = rel(q_norm(w, 0.0, 0, 0), q_norm(wd, 0.0, 0, 0));
    double pd = rel(p_norm(w, 0.0, 1, xm), p_norm(wd, 0.0, 1, xm));
    r.check("q_norm against a 4x denser grid", qd <= rel_tol, num(qd));
    r.check("p_norm against a 4x denser grid", pd <= rel_tol, num(pd));
    Field2D u = sample_field(g, Frame::physical_y, "u", model);
    double x1 = std::sqrt((1.0 - 1.0 / xm) * (1.0 - std::exp(-2.0 * ym)) / 2.0);
    double xd = rel(z_norm(u, zero, 0.01, {}).value("X1"), x1);
    r.check("X1 of e^{-y}/x against closed form", xd <= rel_tol, num(xd));
    r.metrics = {{"homogeneity", h}, {"q_dense", qd}, {"p_dense", pd}, {"x1_closed_form", xd}};
    r.runtime = seconds_since(t0);
    return r;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "kernel") return check_kernel(seed);
    if (name == "hardy") return check_hardy(seed);
    if (name == "front") return check_front();
    if (name == "norms") return check_norms(seed);
    throw std::invalid_argument("unknown suite " + name);
}

}  // namespace pbl
