#pragma once

#include <span>
#include <vector>

namespace pbl {

/// Not-a-knot cubic spline on strictly increasing nodes (>= 4 nodes).
/// Outside the node range the end cubic is extrapolated; callers clamp.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> t, std::span<const double> f);

    double operator()(double t) const { return eval(t, 0); }
    double eval(double t, int k) const;
    /// integral of the interpolant from the first node to t
    double integral(double t) const;
    std::size_t locate(double t) const;

    double front() const { return t_.front(); }
    double back() const { return t_.back(); }
    const std::vector<double>& nodes() const { return t_; }
    const std::vector<double>& values() const { return f_; }

    /// polynomial coefficients of piece i in s = t - t_i: c0 + c1 s + c2 s^2 + c3 s^3
    void piece(std::size_t i, double c[4]) const;

private:
    std::vector<double> t_, f_, m_;  // m_ holds second derivatives
    std::vector<double> cum_;        // integral up to each node
};

/// Cubic Hermite interpolation on one interval.
double hermite(double t0, double t1, double f0, double f1, double d0, double d1, double t);

}  // namespace pbl
