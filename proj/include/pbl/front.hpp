#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pbl {

/// Self-similar front phi*(z) bridging 0 at the wall to delta at infinity.
struct FrontProfile {
    double delta = 0.0;
    double z_max = 16.0;
    std::vector<double> z;
    std::vector<double> phi_star;
    std::vector<double> dphi;  // phi*' at the nodes
    std::vector<double> psi;   // phi* - e_delta
    double dphi0 = 0.0;
    double residual = 0.0;     // sup of the collocated ODE residual
    int newton_iterations = 0;

    /// phi*^(k)(z), k <= 3; beyond z_max returns delta (k = 0) or 0.
    double phi(double z, int k = 0) const;
};

class NewtonError : public std::runtime_error {
public:
    NewtonError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual) {}
    double last_residual;
};

class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// k-th derivative (k <= 2) of e_delta(z) = (delta / sqrt(pi)) int_0^z exp(-t^2 / 4) dt.
double erf_front(double delta, double z, int k = 0);

FrontProfile solve_front(double delta, double z_max = 16.0, double bc_tol = 1e-8,
                         double newton_tol = 1e-8, int nodes = 8001);

/// d^k/dx^k d^l/deta^l of phi*(eta / sqrt x), k <= 2, l <= 2, k + l <= 3.
double front_eval(const FrontProfile& f, double x, double eta, int k, int l);

}  // namespace pbl
