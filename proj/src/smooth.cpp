#include "pbl/smooth.hpp"

#include <cmath>

#include <boost/math/differentiation/autodiff.hpp>

namespace pbl {

double smooth_step(double t, int k) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return k == 0 ? 1.0 : 0.0;
    if (k == 0) {
        double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
        return a / (a + b);
    }
    using boost::math::differentiation::make_fvar;
    auto s = make_fvar<double, 3>(t);
    auto a = exp(-1.0 / s);
    auto b = exp(-1.0 / (1.0 - s));
    auto r = a / (a + b);
    return r.derivative(k);
}

}  // namespace pbl
