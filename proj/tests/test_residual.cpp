#include <cmath>
#include <random>

#include "doctest.h"
#include "pbl/pipeline.hpp"
#include "pbl/residual.hpp"

using namespace pbl;

namespace {

RunConfig small_config() {
    RunConfig c;
    c.nx = 128;
    c.companions = false;
    return c;
}

const LayerSet& small_layers() {
    static const LayerSet L = expansion(small_config());
    return L;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a * std::pow(b / a, double(i) / (n - 1));
    return x;
}

}  // namespace

TEST_CASE("weighted window sup") {
    auto x = logspace(1.0, 2000.0, 300);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -3.0 * std::pow(x[i], -1.5);
    CHECK(weighted_window_sup(x, g, 1.5) == doctest::Approx(3.0));
    // outside the window nothing counts
    g[0] = 1e9;
    g.back() = 1e9;
    CHECK(weighted_window_sup(x, g, 1.5) == doctest::Approx(3.0));
}

TEST_CASE("eps-exponents of synthetic members match the log-ratio oracle") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> pr(0.2, 1.0), pe(0.2, 0.6), amp(0.0, 0.5), k(0.1, 10.0);
    ScalingOptions opt;
    const double rate_r = 1.25 - 2.0 * opt.sigma_n - opt.kappa, rate_e = 1.25 - opt.sigma_n - opt.kappa;
    auto x = logspace(1.0, 2000.0, 256);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = pr(rng), q = pe(rng), a = amp(rng), K = k(rng);
        std::vector<ScalingMember> ms;
        for (double eps : {1e-2, 3e-3, 1e-3}) {
            ScalingMember m;
            m.epsilon = eps;
            m.ok = true;
            m.x = x;
            for (double xi : x) {
                const double shape = 1.0 + a * std::sin(std::log(xi));
                m.remainder_l2.push_back(K * std::pow(eps, p) * std::pow(xi, -rate_r) * shape);
                m.cutoff_l2.push_back(std::pow(eps, q) * std::pow(xi, -rate_e) * shape);
            }
            ms.push_back(m);
        }
        ScalingMember broken;
        broken.epsilon = 1e-4;
        broken.error = "diverged";
        ms.push_back(broken);

        NormReport rep = epsilon_exponents(ms, opt);
        REQUIRE(rep.slope_fits.size() == 2);
        // same shape at every eps, so C(eps) ratios are exactly eps ratios to the power
        const double oracle_p = std::log(weighted_window_sup(x, ms[0].remainder_l2, rate_r) /
                                         weighted_window_sup(x, ms[2].remainder_l2, rate_r)) / std::log(10.0);
        CHECK(oracle_p == doctest::Approx(p).epsilon(1e-10));
        CHECK(rep.slope_fits[0].fit.slope == doctest::Approx(p).epsilon(1e-9));
        CHECK(rep.slope_fits[1].fit.slope == doctest::Approx(q).epsilon(1e-9));
        CHECK(*rep.slope_fits[0].pass == (p >= opt.p_remainder_min));
        CHECK(*rep.slope_fits[1].pass == (q >= opt.p_cutoff_min));
        CHECK(rep.flags.size() == 1);
    }
}

TEST_CASE("eps-exponent with one usable member is degenerate") {
    ScalingMember m;
    m.epsilon = 1e-3;
    m.ok = true;
    m.x = {10.0, 100.0};
    m.remainder_l2 = {1.0, 0.1};
    m.cutoff_l2 = {1.0, 0.1};
    NormReport rep = epsilon_exponents({m}, ScalingOptions{});
    CHECK(rep.slope_fits.empty());
    CHECK(rep.flags.size() == 2);
    CHECK_THROWS(scaling_study([](double) -> LayerSet { return {}; }, {1e-2, 1e-3}, ScalingOptions{}));
    CHECK_THROWS(scaling_study([](double) -> LayerSet { return {}; }, {3e-3, 2e-3, 1e-3}, ScalingOptions{}));
}

TEST_CASE("delta-linearity flags only the asserted quantities") {
    std::map<std::string, double> big = {{"E.size a", 2.0}, {"uP.x b", 10.0}, {"uP.xx c", 5.0}, {"only big", 1.0}};
    std::map<std::string, double> small = {{"E.size a", 1.0}, {"uP.x b", 1.0}, {"uP.xx c", 1.0}};
    NormReport rep = delta_linearity(big, small, {"E.size ", "uP.x "});
    REQUIRE(rep.flags.size() == 2);
    for (const auto& f : rep.flags) {
        if (f.check.find("E.size") != std::string::npos) CHECK(f.pass);
        else CHECK_FALSE(f.pass);
    }
    CHECK(rep.entries.size() == 3);
}

TEST_CASE("composite expansion: wall values and split") {
    const LayerSet& L = small_layers();
    CompositeFlow f = compose(L);
    for (std::size_t i = 0; i < L.grid->nx(); i += 9) {
        CHECK(f.us(i, 0) == doctest::Approx(1.0 - L.delta).epsilon(1e-8));
        CHECK(f.vs(i, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    }
    Field2D split = f.uP + f.uE - f.us;
    CHECK(split.max_abs() < 1e-12);

    auto tagged = delta_tagged(f, L);
    for (const char* key : {"vP.size v^P_R j=1 m=2", "uP.x u^P_R m=0", "E.size u^E_R - 1", "E.size v^E_R", "E.size v^E_RY"})
        CHECK_MESSAGE(tagged.count(key), key);
}

TEST_CASE("restriction by stride 1 reproduces the remainder, stride 2 stays close") {
    const LayerSet& L = small_layers();
    Field2D R = structural_remainder(L);
    Field2D R1 = structural_remainder(restrict_layers(L, 1));
    CHECK((R - R1).max_abs() <= 1e-12 * R.max_abs());
    LayerSet C = restrict_layers(L, 2);
    CHECK(C.grid->nx() == (L.grid->nx() + 1) / 2);
    CHECK(C.up.size() == L.up.size());
}

TEST_CASE("remainder refuses a grid that cannot resolve it") {
    const LayerSet& L = small_layers();
    CompositeFlow f = compose(L);
    RemainderOptions strict;
    strict.factor = 1e12;
    CHECK_THROWS_AS(remainder(f, L, strict), RefinementError);
    RemainderOptions off;
    off.two_grid = false;
    RemainderFields R = remainder(f, L, off);
    CHECK(R.Ru.max_abs() > 0.0);
    CHECK(R.Ru.max_abs() < R.Ru_direct.max_abs());
}
