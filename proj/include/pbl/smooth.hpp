#pragma once

#include <cmath>

namespace pbl {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1. Returns the k-th derivative, k <= 3.
double smooth_step(double t, int k = 0);

/// Cutoff equal to 1 on [0, 1] and 0 beyond 2.
inline double cutoff(double s, int k = 0) {
    double v = smooth_step(s - 1.0, k);
    return k == 0 ? 1.0 - v : -v;
}

}  // namespace pbl
