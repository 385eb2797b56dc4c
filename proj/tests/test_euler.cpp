#include <cmath>
#include <random>

#include "doctest.h"
#include "pbl/checks.hpp"
#include "pbl/euler.hpp"

using namespace pbl;

namespace {

std::vector<double> breaks_to(double far) {
    std::vector<double> b = {0.0};
    for (double t = 0.125; t < far; t *= 2.0) {
        b.push_back(t);
        b.push_back(-t);
    }
    return b;
}

// Harmonic extension of 1/(1 + x^2) and its conjugate: the analytic function i/(z + i).
double v_exact(double x, double Y) { return (1.0 + Y) / ((1.0 + Y) * (1.0 + Y) + x * x); }
double u_exact(double x, double Y) { return x / ((1.0 + Y) * (1.0 + Y) + x * x); }

}  // namespace

TEST_CASE("kernel derivatives and harmonicity by finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(0.2, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = ux(rng), Y = uy(rng), h = 1e-4;
        for (int k = 0; k < 3; ++k) {
            double fd = (poisson_kernel(x + h, Y, k) - poisson_kernel(x - h, Y, k)) / (2 * h);
            CHECK(fd == doctest::Approx(poisson_kernel(x, Y, k + 1)).epsilon(1e-5).scale(1.0));
        }
        double pYY = (poisson_kernel(x, Y + h, 0) - 2 * poisson_kernel(x, Y, 0) + poisson_kernel(x, Y - h, 0)) / (h * h);
        CHECK(poisson_kernel(x, Y, 2) + pYY == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
        // the conjugate kernel is the CR partner: d_Y Q = d_x P
        double qY = (conjugate_kernel(x, Y + h) - conjugate_kernel(x, Y - h)) / (2 * h);
        CHECK(qY == doctest::Approx(poisson_kernel(x, Y, 1)).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("Poisson and conjugate integrals of 1/(1 + x^2)") {
    TraceFunction f = line_trace([](double t) { return 1.0 / (1.0 + t * t); }, breaks_to(1e8));
    for (double Y : {0.01, 0.3, 1.0, 10.0, 100.0})
        for (double x : {-50.0, -1.0, 0.0, 0.5, 7.0, 300.0}) {
            CHECK(poisson_integral(f, x, Y) == doctest::Approx(v_exact(x, Y)).epsilon(1e-6));
            CHECK(poisson_integral(f, x, Y, true) == doctest::Approx(u_exact(x, Y)).epsilon(1e-5));
        }
    CHECK(poisson_integral(f, 2.0, 0.0) == doctest::Approx(0.2));
}

TEST_CASE("kernel suite") {
    SuiteResult r = check_kernel(20240611);
    for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.check << " " << c.detail);
    CHECK(r.runtime < 5.0);
}

TEST_CASE("refinement study: an exact CR pair converges at second order, the control does not") {
    GridPtr phys = make_grid(2000.0, 512, 2500.0, 256, StretchLaw::geometric(1.03), 2);
    GridPtr eg = euler_grid(phys, 1e-3);
    Field2D v = sample_field(eg, Frame::euler_Y, "v", v_exact);
    Field2D u = sample_field(eg, Frame::euler_Y, "u", u_exact);
    RefinementStudy rs = refinement_study(u, v);
    CHECK(rs.order_cr > 1.5);
    CHECK(rs.order_harmonic > 1.5);
    CHECK(rs.order_cancellation > 1.5);
    CHECK(std::abs(rs.control_order_cr) < 0.5);
    CHECK(std::abs(rs.control_order_cancellation) < 0.5);
    CHECK(rs.control_fine.cr > 0.5);
}

TEST_CASE("Euler grid extends the scaled physical nodes") {
    GridPtr phys = make_grid(2000.0, 64, 2500.0, 256, StretchLaw::geometric(1.03), 2);
    GridPtr eg = euler_grid(phys, 1e-3);
    for (std::size_t j = 0; j < phys->ny(); ++j) CHECK(eg->y[j] == doctest::Approx(std::sqrt(1e-3) * phys->y[j]));
    CHECK(eg->y.back() >= 10.0 * 2000.0);
    Field2D e = sample_field(eg, Frame::euler_Y, "e", [](double x, double Y) { return x + Y; });
    Field2D p = to_physical(e, phys, 1e-3);
    CHECK(p(5, 100) == doctest::Approx(phys->x[5] + std::sqrt(1e-3) * phys->y[100]));
}

TEST_CASE("Euler layer of a decaying trace: decay rates and CR residual") {
    GridPtr phys = make_grid(2000.0, 192, 2500.0, 256, StretchLaw::geometric(1.03), 2);
    GridPtr eg = euler_grid(phys, 1e-3);
    std::vector<double> trace(phys->nx());
    for (std::size_t i = 0; i < trace.size(); ++i) trace[i] = 0.01 * std::pow(phys->x[i], -0.5);
    EulerLayer L = euler_layer(1, phys->x, trace, eg, 1e-3);
    NormReport r = euler_report(L, -0.5);
    for (const auto& s : r.slope_fits)
        if (s.pass) CHECK_MESSAGE(*s.pass, s.quantity << " slope " << s.fit.slope);
    for (std::size_t i = 0; i < phys->nx(); i += 20) CHECK(L.v(i, 0) == doctest::Approx(trace[i]).epsilon(1e-8));
    CHECK(L.quad_error < 1e-6);
    HarmonicResiduals h = harmonic_residuals(L.u, L.v, 10.0, 1000.0, 1.0);
    CHECK(h.cr < 1e-2);
    CHECK(h.harmonic < 1e-2);
}
