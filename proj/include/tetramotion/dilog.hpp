#pragma once

#include <cmath>
#include <stdexcept>

namespace tetramotion {

namespace detail {

// power series sum_{k>=1} z^k/k^2, valid after reduction to |z| <= 1/2
inline double dilog_series(double z) {
    double term = z;
    double sum = z;
    for (int k = 2; k < 80; ++k) {
        term *= z;
        const double add = term / (k * k);
        sum += add;
        if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

}  // namespace detail

// Real dilogarithm Li2(z) for z <= 1. Argument reduction: inversion for
// z < -1, Landen for z in [-1,0), reflection for z in (1/2,1], plain series
// on [0,1/2]; uniformly ~1e-15 accurate on the real branch.
inline double dilog(double z) {
    constexpr double pi2_6 = 1.6449340668482264;   // pi^2/6
    if (!(z <= 1.0)) {
        if (z <= 1.0 + 1e-12) {
            z = 1.0;
        } else {
            throw std::domain_error("dilog: argument must be <= 1 on the real branch");
        }
    }
    if (z == 1.0) return pi2_6;
    if (z == 0.0) return 0.0;
    if (z < -1.0) {
        const double l = std::log(-z);
        return -pi2_6 - 0.5 * l * l - dilog(1.0 / z);
    }
    if (z < 0.0) {
        // Landen: Li2(z) = -Li2(z/(z-1)) - ln^2(1-z)/2, with z/(z-1) in (0,1/2]
        const double l = std::log1p(-z);
        return -detail::dilog_series(z / (z - 1.0)) - 0.5 * l * l;
    }
    if (z > 0.5) {
        return pi2_6 - std::log(z) * std::log1p(-z) - detail::dilog_series(1.0 - z);
    }
    return detail::dilog_series(z);
}

}  // namespace tetramotion
