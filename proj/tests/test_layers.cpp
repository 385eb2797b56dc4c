#include <cmath>
#include <random>

#include "doctest.h"
#include "pbl/layers.hpp"

using namespace pbl;

namespace {

// Smooth variable coefficients with the exact pair u = e^{-y}/x, v = (1 - e^{-y})/x^2.
LayerCoefficients mms(const GridPtr& g) {
    auto S = [&](const std::function<double(double, double)>& f) { return sample_field(g, Frame::physical_y, "c", f); };
    LayerCoefficients c;
    c.a = S([](double, double y) { return 1.0 + 0.1 * std::exp(-y); });
    c.A = S([](double x, double) { return 0.2 / x; });
    c.B = S([](double, double y) { return 0.1 * y * std::exp(-y); });
    c.C = S([](double, double y) { return 0.05 * std::exp(-y); });
    c.F = S([](double x, double y) {
        const double e = std::exp(-y), u = e / x;
        return (1.0 + 0.1 * e) * (-u / x) + 0.2 / x * u - 0.1 * y * e * u + 0.05 * e * (1.0 - e) / (x * x) - u;
    });
    c.b.resize(g->nx());
    for (std::size_t i = 0; i < g->nx(); ++i) c.b[i] = 1.0 / g->x[i];
    c.U = [](double y) { return std::exp(-y); };
    return c;
}

double u_mms(double x, double y) { return std::exp(-y) / x; }
double v_mms(double x, double y) { return (1.0 - std::exp(-y)) / (x * x); }

}  // namespace

TEST_CASE("homogenizer moments") {
    CHECK(homogenizer(0.0) == 1.0);
    CHECK(homogenizer(0.0, 1) == doctest::Approx(0.0).scale(1.0));
    CHECK(homogenizer(60.0, -1) == doctest::Approx(0.0).scale(1.0));
    const double h = 1e-5;
    for (double y : {0.3, 1.0, 2.5, 7.0}) {
        CHECK((homogenizer(y + h) - homogenizer(y - h)) / (2 * h) == doctest::Approx(homogenizer(y, 1)).epsilon(1e-6));
        CHECK((homogenizer(y + h, -1) - homogenizer(y - h, -1)) / (2 * h) == doctest::Approx(homogenizer(y)).epsilon(1e-6));
    }
}

TEST_CASE("variable-coefficient layer solver converges at first order in x") {
    MmsStudy st = manufactured_study({128, 256, 512});
    for (std::size_t k = 1; k < st.nx.size(); ++k) {
        CHECK(st.factor_u[k] >= 1.8);
        CHECK(st.factor_v[k] >= 1.8);
    }
    CHECK(st.error_u.back() < 2e-3);
}

TEST_CASE("the layer operator annihilates the discrete solution") {
    GridPtr g = make_grid(100.0, 256, 40.0, 160, StretchLaw::geometric(1.03), 2);
    LayerCoefficients c = mms(g);
    LayerSolution s = solve_linear_layer(c, true, 1e-3);
    Field2D r = apply_layer_operator(c, s.u, s.v) - c.F;
    Field2D e = apply_layer_operator(c, sample_field(g, Frame::physical_y, "u", u_mms),
                                     sample_field(g, Frame::physical_y, "v", v_mms)) - c.F;
    // the exact pair leaves only truncation error, comparable to that of the solution
    CHECK(e.max_abs() < 0.05 * c.F.max_abs());
    CHECK(r.max_abs() < 0.05 * c.F.max_abs());
    for (std::size_t i = 0; i < g->nx(); i += 31) CHECK(s.v(i, 0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("cutoff keeps the pair divergence free and its error formula matches the operator") {
    const double eps = 0.01;
    GridPtr g = make_grid(100.0, 512, 40.0, 200, StretchLaw::geometric(1.025), 2);
    LayerCoefficients c = mms(g);
    Field2D up = sample_field(g, Frame::physical_y, "u", u_mms), vp = sample_field(g, Frame::physical_y, "v", v_mms);
    CutoffResult r = cutoff_final_layer(up, vp, c, eps, 1e-3);

    Field2D div = diff(r.u, Axis::x, 1) + diff(r.v, Axis::y, 1);
    Field2D ux = diff(r.u, Axis::x, 1);
    CHECK(div.max_abs() < 0.02 * ux.max_abs());

    Field2D direct = apply_layer_operator(c, r.u, r.v) - c.F;
    CHECK((direct - r.error).max_abs() < 0.05 * r.error.max_abs());
    CHECK(r.error.max_abs() > 0.0);
    // chi = 1 below the cutoff band: v^n = v_p there
    CHECK(r.v(g->nx() - 1, 10) == vp(g->nx() - 1, 10));
}

TEST_CASE("cancellation check separates a CR pair from its conjugate-flipped control") {
    GridPtr g = make_grid(1000.0, 256, 200.0, 200, StretchLaw::geometric(1.03), 2);
    Field2D v = sample_field(g, Frame::euler_Y, "v", [](double x, double Y) { return (1 + Y) / ((1 + Y) * (1 + Y) + x * x); });
    Field2D u = sample_field(g, Frame::euler_Y, "u", [](double x, double Y) { return x / ((1 + Y) * (1 + Y) + x * x); });
    CHECK(cancellation_check(u, v).residual < 1e-2);
    CHECK(cancellation_check(u, -1.0 * v).residual > 0.1);
}

TEST_CASE("cutoff fields are consistent with their derivatives") {
    std::mt19937_64 rng(23);
    GridPtr g = make_grid(100.0, 400, 40.0, 300, StretchLaw::geometric(1.015), 2);
    CutoffFields k = cutoff_fields(g, 0.01);
    Field2D cx = diff(k.chi, Axis::x, 1), cy = diff(k.chi, Axis::y, 1);
    std::uniform_int_distribution<std::size_t> pi(1, g->nx() - 2), pj(1, g->ny() - 2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t i = pi(rng), j = pj(rng);
        CHECK(cx(i, j) == doctest::Approx(k.chi_x(i, j)).scale(1.0).epsilon(2e-2));
        CHECK(cy(i, j) == doctest::Approx(k.chi_y(i, j)).scale(1.0).epsilon(2e-2));
    }
}
