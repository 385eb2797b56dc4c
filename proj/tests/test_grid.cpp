#include <cmath>
#include <random>

#include "doctest.h"
#include "pbl/grid.hpp"
#include "pbl/smooth.hpp"
#include "pbl/spline.hpp"

using namespace pbl;

TEST_CASE("geometric y nodes and log-uniform x nodes") {
    GridPtr g = make_grid(2000.0, 64, 2500.0, 100, StretchLaw::geometric(1.03), 2);
    CHECK(g->y.front() == 0.0);
    CHECK(g->y.back() == 2500.0);
    for (std::size_t j = 2; j + 1 < g->ny(); ++j)
        CHECK((g->y[j] - g->y[j - 1]) / (g->y[j - 1] - g->y[j - 2]) == doctest::Approx(1.03).epsilon(1e-9));
    CHECK(g->x.front() == 1.0);
    CHECK(g->x.back() == doctest::Approx(2000.0));
    for (std::size_t i = 2; i < g->nx(); ++i)
        CHECK(g->x[i] / g->x[i - 1] == doctest::Approx(g->x[1] / g->x[0]).epsilon(1e-9));
}

TEST_CASE("grid parameters are validated") {
    CHECK_THROWS(make_grid(5.0, 64, 10.0, 64, StretchLaw::geometric(1.03), 2));
    CHECK_THROWS(make_grid(100.0, 4, 10.0, 64, StretchLaw::geometric(1.03), 2));
    CHECK_THROWS(make_grid(100.0, 64, 10.0, 64, StretchLaw::geometric(1.03), 3));
    CHECK_THROWS(make_grid(100.0, 64, 10.0, 64, StretchLaw::geometric(1.5), 2));
    CHECK_THROWS(parse_stretch("geometric:1.03"));
    CHECK(parse_stretch("geometric(1.05)").param == 1.05);
    CHECK(to_string(parse_stretch("tanh(2.5)")) == "tanh(2.5)");
}

TEST_CASE("fd_weights differentiate random polynomials exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0), gap(0.05, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> nodes(5);
        nodes[0] = u(rng);
        for (int l = 1; l < 5; ++l) nodes[l] = nodes[l - 1] + gap(rng);
        double c[5];
        for (double& v : c) v = u(rng);
        auto p = [&](double t, int k) {
            double s = 0.0;
            for (int d = k; d < 5; ++d) {
                double f = 1.0;
                for (int q = 0; q < k; ++q) f *= d - q;
                s += c[d] * f * std::pow(t, d - k);
            }
            return s;
        };
        const double x0 = nodes[0] + gap(rng);
        std::vector<double> f(5);
        for (int l = 0; l < 5; ++l) f[l] = p(nodes[l], 0);
        for (int k = 1; k <= 3; ++k) {
            auto w = fd_weights(x0, nodes, k);
            double d = 0.0;
            for (int l = 0; l < 5; ++l) d += w[l] * f[l];
            CHECK(d == doctest::Approx(p(x0, k)).epsilon(1e-7));
        }
    }
}

TEST_CASE("diff is exact on quadratics at second order and converges on smooth fields") {
    GridPtr g = make_grid(100.0, 40, 30.0, 60, StretchLaw::geometric(1.05), 2);
    Field2D q = sample_field(g, Frame::physical_y, "q", [](double x, double y) { return 3 * x * x - x * y + 2 * y * y; });
    Field2D qy = diff(q, Axis::y, 1), qyy = diff(q, Axis::y, 2), qx = diff(q, Axis::x, 1);
    double ey = 0.0, eyy = 0.0, ex = 0.0;
    for (std::size_t i = 0; i < g->nx(); ++i)
        for (std::size_t j = 0; j < g->ny(); ++j) {
            const double x = g->x[i], y = g->y[j];
            ey = std::max(ey, std::abs(qy(i, j) - (-x + 4 * y)) / (1 + std::abs(x) + 4 * y));
            eyy = std::max(eyy, std::abs(qyy(i, j) - 4.0));
            ex = std::max(ex, std::abs(qx(i, j) - (6 * x - y)) / (6 * x + y));
        }
    CHECK(ey < 1e-10);
    CHECK(eyy < 1e-7);
    CHECK(ex < 1e-10);

    auto err = [](int ny) {
        GridPtr h = make_grid(10.0, 16, 10.0, ny, StretchLaw::uniform(), 2);
        Field2D s = sample_field(h, Frame::physical_y, "s", [](double, double y) { return std::sin(y); });
        Field2D d = diff(s, Axis::y, 2);
        double e = 0.0;
        for (std::size_t j = 0; j < h->ny(); ++j) e = std::max(e, std::abs(d(3, j) + std::sin(h->y[j])));
        return e;
    };
    CHECK(std::log2(err(101) / err(201)) > 1.8);
}

TEST_CASE("quadrature and cumulative integrals against closed forms") {
    GridPtr g = make_grid(10.0, 12, 40.0, 200, StretchLaw::geometric(1.03), 4);
    std::vector<double> f(g->ny());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = std::exp(-g->y[j]);
    CHECK(quad_line(g->y, f, 4) == doctest::Approx(1.0 - std::exp(-40.0)).epsilon(1e-7));

    Field2D e = sample_field(g, Frame::physical_y, "e", [](double, double y) { return std::exp(-y); });
    Field2D tail = cumulative_tail_y(e, 1e-3);
    Field2D head = cumulative_y(e);
    for (std::size_t j = 0; j < g->ny(); j += 17) {
        CHECK(tail(3, j) == doctest::Approx(std::exp(-g->y[j]) - std::exp(-40.0)).epsilon(1e-6));
        CHECK(head(3, j) == doctest::Approx(1.0 - std::exp(-g->y[j])).epsilon(1e-6));
    }
    CHECK(tail.warnings.empty());

    Field2D slow = sample_field(g, Frame::physical_y, "slow", [](double, double y) { return 1.0 / (1.0 + y); });
    CHECK_FALSE(cumulative_tail_y(slow, 1e-3).warnings.empty());
}

TEST_CASE("subsample and restrict agree") {
    GridPtr g = make_grid(100.0, 33, 20.0, 41, StretchLaw::geometric(1.04), 2);
    GridPtr c = subsample(g, 2);
    CHECK(c->nx() == 17);
    CHECK(c->ny() == 21);
    Field2D f = sample_field(g, Frame::physical_y, "f", [](double x, double y) { return x + 10 * y; });
    Field2D r = restrict_field(f, c, 2);
    for (std::size_t i = 0; i < c->nx(); ++i)
        for (std::size_t j = 0; j < c->ny(); ++j) CHECK(r(i, j) == c->x[i] + 10 * c->y[j]);
}

TEST_CASE("not-a-knot spline reproduces cubics and integrates them") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0), gap(0.1, 0.8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> t(9), f(9);
        t[0] = u(rng);
        for (std::size_t k = 1; k < t.size(); ++k) t[k] = t[k - 1] + gap(rng);
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        auto p = [&](double s) { return a + b * s + c * s * s + d * s * s * s; };
        auto P = [&](double s) { return a * s + b * s * s / 2 + c * s * s * s / 3 + d * s * s * s * s / 4; };
        for (std::size_t k = 0; k < t.size(); ++k) f[k] = p(t[k]);
        CubicSpline sp(t, f);
        const double s = t[2] + 0.37 * (t[3] - t[2]);
        CHECK(sp(s) == doctest::Approx(p(s)).epsilon(1e-9));
        CHECK(sp.eval(s, 1) == doctest::Approx(b + 2 * c * s + 3 * d * s * s).epsilon(1e-8));
        CHECK(sp.integral(s) == doctest::Approx(P(s) - P(t[0])).epsilon(1e-9));
    }
}

TEST_CASE("smooth step and cutoff") {
    CHECK(smooth_step(-0.5) == 0.0);
    CHECK(smooth_step(1.5) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    CHECK(cutoff(0.5) == 1.0);
    CHECK(cutoff(2.5) == 0.0);
    double prev = 0.0;
    for (double t = 0.0; t <= 1.0; t += 0.01) {
        CHECK(smooth_step(t) >= prev);
        prev = smooth_step(t);
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-5;
            double fd = (smooth_step(t + h, k) - smooth_step(t - h, k)) / (2 * h);
            CHECK(fd == doctest::Approx(smooth_step(t, k + 1)).epsilon(1e-4).scale(1.0));
        }
    }
}
