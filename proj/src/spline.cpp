#include "pbl/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbl {

CubicSpline::CubicSpline(std::span<const double> t, std::span<const double> f)
    : t_(t.begin(), t.end()), f_(f.begin(), f.end()) {
    const std::size_t n = t_.size();
    if (n < 4 || f_.size() != n) throw std::invalid_argument("spline needs >= 4 matching nodes");
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t_[i + 1] - t_[i];
        if (!(h[i] > 0)) throw std::invalid_argument("spline nodes must increase");
        d[i] = (f_[i + 1] - f_[i]) / h[i];
    }
    const std::size_t m = n - 2;
    std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t i = r + 1;
        lo[r] = h[i - 1];
        di[r] = 2.0 * (h[i - 1] + h[i]);
        up[r] = h[i];
        rhs[r] = 6.0 * (d[i] - d[i - 1]);
    }
    {
        double h0 = h[0], h1 = h[1];
        di[0] += h0 * (h0 + h1) / h1;
        up[0] -= h0 * h0 / h1;
        lo[0] = 0.0;
    }
    {
        double a = h[n - 3], b = h[n - 2];
        di[m - 1] += b * (a + b) / a;
        lo[m - 1] -= b * b / a;
        up[m - 1] = 0.0;
    }
    // Thomas algorithm; the not-a-knot rows stay diagonally benign for graded meshes.
    for (std::size_t r = 1; r < m; ++r) {
        double w = lo[r] / di[r - 1];
        di[r] -= w * up[r - 1];
        rhs[r] -= w * rhs[r - 1];
    }
    std::vector<double> M(n, 0.0);
    M[m] = rhs[m - 1] / di[m - 1];
    for (std::size_t r = m - 1; r-- > 0;) M[r + 1] = (rhs[r] - up[r] * M[r + 2]) / di[r];
    M[0] = ((h[0] + h[1]) * M[1] - h[0] * M[2]) / h[1];
    M[n - 1] = ((h[n - 3] + h[n - 2]) * M[n - 2] - h[n - 2] * M[n - 3]) / h[n - 3];
    m_ = std::move(M);

    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double c[4];
        piece(i, c);
        double s = h[i];
        cum_[i + 1] = cum_[i] + s * (c[0] + s * (c[1] / 2 + s * (c[2] / 3 + s * c[3] / 4)));
    }
}

std::size_t CubicSpline::locate(double t) const {
    if (t <= t_.front()) return 0;
    if (t >= t_.back()) return t_.size() - 2;
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    return std::size_t(it - t_.begin()) - 1;
}

void CubicSpline::piece(std::size_t i, double c[4]) const {
    double h = t_[i + 1] - t_[i];
    double d = (f_[i + 1] - f_[i]) / h;
    c[0] = f_[i];
    c[1] = d - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    c[2] = 0.5 * m_[i];
    c[3] = (m_[i + 1] - m_[i]) / (6.0 * h);
}

double CubicSpline::eval(double t, int k) const {
    std::size_t i = locate(t);
    double c[4];
    piece(i, c);
    double s = t - t_[i];
    switch (k) {
        case 0: return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
        case 1: return c[1] + s * (2.0 * c[2] + 3.0 * s * c[3]);
        case 2: return 2.0 * c[2] + 6.0 * s * c[3];
        case 3: return 6.0 * c[3];
        default: return 0.0;
    }
}

double CubicSpline::integral(double t) const {
    std::size_t i = locate(t);
    double c[4];
    piece(i, c);
    double s = t - t_[i];
    return cum_[i] + s * (c[0] + s * (c[1] / 2 + s * (c[2] / 3 + s * c[3] / 4)));
}

double hermite(double t0, double t1, double f0, double f1, double d0, double d1, double t) {
    double h = t1 - t0;
    double s = (t - t0) / h;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
           (s3 - s2) * h * d1;
}

}  // namespace pbl
