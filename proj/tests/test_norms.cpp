#include <cmath>
#include <random>

#include "doctest.h"
#include "pbl/checks.hpp"
#include "pbl/norms.hpp"

using namespace pbl;

namespace {

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a * std::pow(b / a, double(i) / (n - 1));
    return x;
}

}  // namespace

TEST_CASE("decay_fit recovers random power laws") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> s(-2.5, 0.5), c(0.1, 10.0);
    auto x = logspace(1.0, 2000.0, 200);
    for (int trial = 0; trial < 100; ++trial) {
        const double slope = s(rng), C = c(rng);
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = C * std::pow(x[i], slope);
        DecayFit f = decay_fit(x, g, 10.0, 1000.0);
        CHECK(f.slope == doctest::Approx(slope).epsilon(1e-10));
        CHECK(std::exp(f.intercept) == doctest::Approx(C).epsilon(1e-9));
        CHECK(f.ci95 < 1e-9);
        CHECK_FALSE(f.non_power_law);
    }
}

TEST_CASE("decay_fit flags oscillating data and short windows") {
    auto x = logspace(1.0, 2000.0, 60);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = std::pow(x[i], -1.0) * std::exp(3.0 * std::sin(3.0 * std::log(x[i])));
    CHECK(decay_fit(x, g, 10.0, 1000.0).non_power_law);
    CHECK_THROWS(decay_fit(x, g, 10.0, 11.0));
    CHECK_NOTHROW(decay_fit(std::vector<double>{1e-3, 1e-2}, std::vector<double>{1.0, 2.0}, 0.0, 1.0, 2));
}

TEST_CASE("hardy ratio of y e^{-y} is sqrt 2") {
    // ||u/y||^2 = int e^{-2y} = 1/2 and ||u'||^2 = int (1-y)^2 e^{-2y} = 1/4
    std::vector<double> y(2001), u(2001);
    for (std::size_t j = 0; j < y.size(); ++j) {
        y[j] = 40.0 * double(j) / 2000.0;
        u[j] = y[j] * std::exp(-y[j]);
    }
    CHECK(hardy_check(y, u) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("hardy suite and norm suite pass") {
    SuiteResult h = check_hardy(20240611);
    CHECK(h.pass);
    CHECK(h.metrics["worst_ratio"].get<double>() <= 2.0 + 1e-3);
    SuiteResult n = check_norms(20240611);
    for (const auto& f : n.checks) CHECK_MESSAGE(f.pass, f.check << " " << f.detail);
}

TEST_CASE("column norms against closed forms") {
    GridPtr g = make_grid(100.0, 16, 30.0, 400, StretchLaw::geometric(1.015), 4);
    Field2D f = sample_field(g, Frame::physical_y, "f", [](double x, double y) { return std::exp(-y) / x; });
    auto sup = column_sup(f), l2 = column_l2(f);
    for (std::size_t i = 0; i < g->nx(); ++i) {
        CHECK(sup[i] == doctest::Approx(1.0 / g->x[i]));
        CHECK(l2[i] == doctest::Approx(std::sqrt(0.5) / g->x[i]).epsilon(1e-6));
    }
    auto w = column_weighted_sup(f, [](double x, double) { return x; });
    for (double v : w) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("norms are absolutely homogeneous on random fields") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> c(-4.0, 4.0), a(0.3, 2.0);
    GridPtr g = make_grid(100.0, 48, 30.0, 64, StretchLaw::geometric(1.05), 2);
    for (int trial = 0; trial < 10; ++trial) {
        const double k = c(rng), r = a(rng);
        Field2D w = sample_field(g, Frame::von_mises_eta, "w", [r](double x, double y) { return std::exp(-r * y) / x; });
        Field2D kw = k * w;
        CHECK(q_norm(kw, 0.1, 1, 1) == doctest::Approx(std::abs(k) * q_norm(w, 0.1, 1, 1)).epsilon(1e-12));
        CHECK(p_norm(kw, 0.1, 2, 100.0, 1) == doctest::Approx(std::abs(k) * p_norm(w, 0.1, 2, 100.0, 1)).epsilon(1e-12));
    }
}
