#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pbl/prandtl_zero.hpp"

using namespace pbl;

TEST_CASE("self-similar data stays self-similar at backward-Euler order") {
    FrontProfile f = solve_front(0.05);
    MarchStudy st = march_convergence(f, {129, 257, 513});
    REQUIRE(st.error.size() == 3);
    CHECK(st.error[2] < 1e-4);
    CHECK(st.factor[1] >= 1.8);
    CHECK(st.factor[2] >= 1.8);
    CHECK(st.min_one_plus_u >= 0.95 - 1e-10);
}

TEST_CASE("maximum principle on random admissible in-flows") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ua(0.5, 2.0), ud(0.01, 0.1), unit(0.0, 1.0);
    GridPtr g = make_grid(100.0, 64, 400.0, 160, StretchLaw::geometric(1.04), 2);
    for (int trial = 0; trial < 8; ++trial) {
        const double delta = ud(rng), a = ua(rng), b = a * unit(rng);
        FrontProfile f = solve_front(delta);
        Inflow in{"random", false, [=](double y) { return -delta * (1.0 + b * y * y) * std::exp(-a * y * y); }};
        Prandtl0Solution s = solve_prandtl_zero(in, delta, f, g, {}, 1e-8, 1e-3);
        CHECK(s.min_one_plus_u >= 1.0 - delta - 1e-10);
        CHECK(*std::max_element(s.u0p.values.begin(), s.u0p.values.end()) <= 1e-10);
    }
}

TEST_CASE("leading layer on the default grid: decay, divergence and wall value") {
    const double delta = 0.05;
    FrontProfile f = solve_front(delta);
    GridPtr g = make_grid(2000.0, 512, 2500.0, 256, StretchLaw::geometric(1.03), 2);
    Prandtl0Solution s = solve_prandtl_zero(make_inflow("gaussian_decay", delta, f), delta, f, g, {}, 1e-8, 1e-3);
    DecayFit v = decay_fit(g->x, column_sup(s.v0p), 10.0, 1000.0);
    DecayFit vx = decay_fit(g->x, column_sup(diff(s.v0p, Axis::x, 1)), 10.0, 1000.0);
    CHECK(v.slope == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(vx.slope == doctest::Approx(-1.5).epsilon(0.066));
    for (std::size_t i = 0; i < g->nx(); i += 37) CHECK(s.u0p(i, 0) == doctest::Approx(-delta));

    Field2D div = diff(s.u0p, Axis::x, 1) + diff(s.v0p, Axis::y, 1);
    Field2D ux = diff(s.u0p, Axis::x, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->nx(); ++i) {
        if (g->x[i] < 10.0) continue;
        worst = std::max(worst, div.column_max_abs(i) / ux.column_max_abs(i));
    }
    CHECK(worst < 1e-2);
}

TEST_CASE("von Mises coordinate is int_0^y (1 + u)") {
    const double delta = 0.05;
    FrontProfile f = solve_front(delta);
    GridPtr g = make_grid(200.0, 96, 800.0, 200, StretchLaw::geometric(1.035), 2);
    Prandtl0Solution s = solve_prandtl_zero(make_inflow("gaussian_decay", delta, f), delta, f, g, {}, 1e-8, 1e-3);
    Field2D eta = cumulative_y(map_field(s.u0p, [](double, double, double u) { return 1.0 + u; }));
    double worst = 0.0;
    for (std::size_t i = 0; i < g->nx(); ++i)
        for (std::size_t j = 0; j < g->ny(); ++j)
            worst = std::max(worst, std::abs(eta(i, j) - s.eta_of_y(i, j)) / (1.0 + g->y[j]));
    CHECK(worst < 1e-3);
}

TEST_CASE("in-flow validation") {
    FrontProfile f = solve_front(0.05);
    GridPtr g = make_grid(100.0, 32, 400.0, 128, StretchLaw::geometric(1.04), 2);
    std::vector<std::string> warnings;
    Inflow bad{"bad", false, [](double y) { return -0.04 * std::exp(-y * y); }};
    CHECK_THROWS_AS(march_q(bad, 0.05, g, {}, warnings), std::invalid_argument);
    CHECK_THROWS_AS(make_inflow("nonsense", 0.05, f), std::invalid_argument);
    march_q(make_inflow("perturbed_sine", 0.05, f), 0.05, g, {}, warnings);
    CHECK_FALSE(warnings.empty());
}
