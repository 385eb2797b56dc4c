#include "pbl/front.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbl/spline.hpp"

namespace pbl {

double erf_front(double delta, double z, int k) {
    const double g = delta / std::sqrt(M_PI) * std::exp(-0.25 * z * z);
    switch (k) {
        case 0: return delta * std::erf(0.5 * z);
        case 1: return g;
        case 2: return -0.5 * z * g;
        default: throw std::invalid_argument("erf_front: k must be 0..2");
    }
}

FrontProfile solve_front(double delta, double z_max, double bc_tol, double newton_tol, int nodes) {
    if (!(delta > 0.0 && delta <= 0.1)) throw std::invalid_argument("solve_front: delta must lie in (0, 0.1]");
    if (!(z_max >= 12.0)) throw std::invalid_argument("solve_front: z_max must be >= 12");
    const int n = nodes;
    const double h = z_max / (n - 1);
    FrontProfile fp;
    fp.delta = delta;
    fp.z_max = z_max;
    fp.z.resize(n);
    fp.phi_star.resize(n);
    for (int j = 0; j < n; ++j) {
        fp.z[j] = j * h;
        fp.phi_star[j] = erf_front(delta, fp.z[j]);
    }
    auto& p = fp.phi_star;
    p[0] = 0.0;
    p[n - 1] = delta;

    std::vector<double> r(n, 0.0), lo(n), di(n), up(n);
    auto residual = [&]() {
        double m = 0.0;
        for (int j = 1; j < n - 1; ++j) {
            double a = 1.0 - delta + p[j];
            if (a <= 0.0) {
                std::ostringstream os;
                os << "front degenerate: 1 - delta + phi = " << a << " at z = " << fp.z[j];
                throw DegeneracyError(os.str());
            }
            double d1 = (p[j + 1] - p[j - 1]) / (2 * h);
            double d2 = (p[j + 1] - 2 * p[j] + p[j - 1]) / (h * h);
            r[j] = a * d2 + d1 * d1 + 0.5 * fp.z[j] * d1;
            m = std::max(m, std::abs(r[j]));
        }
        return m;
    };

    double res = residual();
    int it = 0;
    const int max_it = 50;
    while (res > newton_tol) {
        if (++it > max_it)
            throw NewtonError("front Newton failed to converge", res);
        for (int j = 1; j < n - 1; ++j) {
            double a = 1.0 - delta + p[j];
            double d1 = (p[j + 1] - p[j - 1]) / (2 * h);
            double d2 = (p[j + 1] - 2 * p[j] + p[j - 1]) / (h * h);
            double adv = (2.0 * d1 + 0.5 * fp.z[j]) / (2 * h);
            lo[j] = a / (h * h) - adv;
            di[j] = d2 - 2.0 * a / (h * h);
            up[j] = a / (h * h) + adv;
        }
        // Thomas on rows 1..n-2 with zero Dirichlet corrections at both ends
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (int j = 1; j < n - 1; ++j) {
            double m = di[j] - (j > 1 ? lo[j] * c[j - 1] : 0.0);
            c[j] = up[j] / m;
            d[j] = (-r[j] - (j > 1 ? lo[j] * d[j - 1] : 0.0)) / m;
        }
        std::vector<double> dp(n, 0.0);
        for (int j = n - 2; j >= 1; --j) dp[j] = d[j] - (j < n - 2 ? c[j] * dp[j + 1] : 0.0);
        for (int j = 1; j < n - 1; ++j) p[j] += dp[j];
        res = residual();
    }
    fp.residual = res;
    fp.newton_iterations = it;
    if (std::abs(p[n - 1] - delta) > bc_tol) throw std::runtime_error("front boundary condition violated");

    fp.dphi.resize(n);
    for (int j = 0; j < n; ++j) {
        if (j >= 2 && j <= n - 3) {
            fp.dphi[j] = (-p[j + 2] + 8 * p[j + 1] - 8 * p[j - 1] + p[j - 2]) / (12 * h);
        } else if (j < 2) {
            fp.dphi[j] = (-25 * p[j] + 48 * p[j + 1] - 36 * p[j + 2] + 16 * p[j + 3] - 3 * p[j + 4]) / (12 * h);
        } else {
            fp.dphi[j] = (25 * p[j] - 48 * p[j - 1] + 36 * p[j - 2] - 16 * p[j - 3] + 3 * p[j - 4]) / (12 * h);
        }
    }
    fp.dphi0 = fp.dphi[0];
    fp.psi.resize(n);
    for (int j = 0; j < n; ++j) fp.psi[j] = p[j] - erf_front(delta, fp.z[j]);
    return fp;
}

namespace {

// phi'' and phi''' from the ODE given phi and phi'
double ode_d2(double delta, double z, double p, double d1) {
    return -(d1 * d1 + 0.5 * z * d1) / (1.0 - delta + p);
}

double ode_d3(double delta, double z, double p, double d1, double d2) {
    return -(3.0 * d1 * d2 + 0.5 * d1 + 0.5 * z * d2) / (1.0 - delta + p);
}

}  // namespace

double FrontProfile::phi(double zz, int k) const {
    if (zz >= z_max) return k == 0 ? delta : 0.0;
    if (zz < 0.0) zz = 0.0;
    const double h = z[1] - z[0];
    std::size_t i = std::min<std::size_t>(std::size_t(zz / h), z.size() - 2);
    double z0 = z[i], z1 = z[i + 1];
    double p = hermite(z0, z1, phi_star[i], phi_star[i + 1], dphi[i], dphi[i + 1], zz);
    double dd0 = ode_d2(delta, z0, phi_star[i], dphi[i]);
    double dd1 = ode_d2(delta, z1, phi_star[i + 1], dphi[i + 1]);
    double d1 = hermite(z0, z1, dphi[i], dphi[i + 1], dd0, dd1, zz);
    switch (k) {
        case 0: return p;
        case 1: return d1;
        case 2: return ode_d2(delta, zz, p, d1);
        case 3: return ode_d3(delta, zz, p, d1, ode_d2(delta, zz, p, d1));
        default: throw std::invalid_argument("phi: k must be 0..3");
    }
}

double front_eval(const FrontProfile& f, double x, double eta, int k, int l) {
    if (k < 0 || k > 2 || l < 0 || l > 2 || k + l > 3)
        throw std::invalid_argument("front_eval: need k, l <= 2 and k + l <= 3");
    const double z = eta / std::sqrt(x);
    if (z > f.z_max) return (k == 0 && l == 0) ? f.delta : 0.0;
    const double xl = std::pow(x, -0.5 * l);
    if (k == 0) return xl * f.phi(z, l);
    const double H = 0.5 * l * f.phi(z, l) + 0.5 * z * f.phi(z, l + 1);
    if (k == 1) return -xl / x * H;
    const double Hp = 0.5 * (l + 1) * f.phi(z, l + 1) + 0.5 * z * f.phi(z, l + 2);
    return xl / (x * x) * ((0.5 * l + 1.0) * H + 0.5 * z * Hp);
}

}  // namespace pbl
