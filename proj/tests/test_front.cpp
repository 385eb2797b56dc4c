#include <cmath>

#include "doctest.h"
#include "pbl/checks.hpp"
#include "pbl/front.hpp"

using namespace pbl;

namespace {

// Independent oracle: RK4 shooting on ((1 - delta + phi) phi')' + (z/2) phi' = 0
// with g = (1 - delta + phi) phi', bisecting on phi'(0) until phi(z_max) = delta.
struct Shot {
    std::vector<double> z, phi;
    double slope0 = 0.0;
};

Shot integrate(double delta, double s, double z_max, int steps) {
    Shot r;
    r.slope0 = s;
    const double h = z_max / steps;
    double phi = 0.0, g = (1.0 - delta) * s, z = 0.0;
    auto rhs = [delta](double z, double phi, double g, double& dphi, double& dg) {
        dphi = g / (1.0 - delta + phi);
        dg = -0.5 * z * dphi;
    };
    r.z.push_back(0.0);
    r.phi.push_back(0.0);
    for (int k = 0; k < steps; ++k) {
        double a1, b1, a2, b2, a3, b3, a4, b4;
        rhs(z, phi, g, a1, b1);
        rhs(z + h / 2, phi + h / 2 * a1, g + h / 2 * b1, a2, b2);
        rhs(z + h / 2, phi + h / 2 * a2, g + h / 2 * b2, a3, b3);
        rhs(z + h, phi + h * a3, g + h * b3, a4, b4);
        phi += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
        g += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
        z += h;
        r.z.push_back(z);
        r.phi.push_back(phi);
    }
    return r;
}

Shot shoot(double delta, double z_max = 16.0, int steps = 16000) {
    double lo = 0.0, hi = delta;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (integrate(delta, mid, z_max, steps).phi.back() < delta) lo = mid;
        else hi = mid;
    }
    return integrate(delta, 0.5 * (lo + hi), z_max, steps);
}

}  // namespace

TEST_CASE("front matches the shooting oracle") {
    for (double delta : {0.01, 0.05, 0.1}) {
        FrontProfile f = solve_front(delta);
        Shot s = shoot(delta);
        CHECK(f.dphi0 == doctest::Approx(s.slope0).epsilon(1e-5));
        double worst = 0.0;
        for (std::size_t k = 0; k < s.z.size(); k += 100) worst = std::max(worst, std::abs(f.phi(s.z[k]) - s.phi[k]));
        CHECK(worst < 1e-7 * delta * 100);
    }
}

TEST_CASE("front is close to the error-function profile for small delta") {
    // phi* - e_delta is O(delta^2)
    double prev = 0.0;
    for (double delta : {0.04, 0.02, 0.01}) {
        FrontProfile f = solve_front(delta);
        double m = 0.0;
        for (double p : f.psi) m = std::max(m, std::abs(p));
        if (prev > 0.0) CHECK(prev / m == doctest::Approx(4.0).epsilon(0.1));
        prev = m;
    }
}

TEST_CASE("front boundary values, derivative and evaluator") {
    FrontProfile f = solve_front(0.05);
    CHECK(f.phi(0.0) == 0.0);
    CHECK(std::abs(f.phi(f.z_max) - 0.05) <= 1e-8);
    CHECK(f.phi(100.0) == 0.05);
    CHECK(f.phi(100.0, 1) == 0.0);
    CHECK(f.dphi0 > 0.0);
    // d/deta phi*(eta / sqrt x) = phi*'(z) / sqrt x
    const double x = 4.0, eta = 3.0;
    CHECK(front_eval(f, x, eta, 0, 1) == doctest::Approx(f.phi(1.5, 1) / 2.0).epsilon(1e-9));
    const double h = 1e-4;
    double fd = (front_eval(f, x + h, eta, 0, 0) - front_eval(f, x - h, eta, 0, 0)) / (2 * h);
    CHECK(front_eval(f, x, eta, 1, 0) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("front rejects delta outside (0, 0.1]") {
    CHECK_THROWS_AS(solve_front(0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_front(0.2), std::invalid_argument);
    CHECK_THROWS_AS(solve_front(0.05, 8.0), std::invalid_argument);
}

TEST_CASE("front suite") {
    SuiteResult r = check_front();
    for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.check << " " << c.detail);
}
