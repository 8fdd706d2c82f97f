#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "errors.hpp"

namespace bloch_qst {

/// Accuracy window: absolute error below 1e-12 for |order| <= 200, |x| <= 100.
inline constexpr int kBesselMaxOrder = 200;
inline constexpr double kBesselMaxArgument = 100.0;

/// Bessel function of the first kind J_order(x), integer order.
///
/// Miller's downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, started from
/// an arbitrary seed well above max(order, x) and normalized with the
/// identity J_0 + 2 * sum_{k>=1} J_{2k} = 1. Downward recurrence is stable in
/// both the oscillatory (k < x) and decaying (k > x) regimes.
inline double bessel_j(int order, double x) {
    if (std::abs(order) > kBesselMaxOrder)
        throw DomainError("Bessel order " + std::to_string(order) + " outside validated window");
    if (!std::isfinite(x) || std::abs(x) > kBesselMaxArgument)
        throw DomainError("Bessel argument outside validated window");

    const int n = std::abs(order);
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
    double sign = 1.0;
    if (order < 0 && (n % 2) != 0) sign = -sign;
    if (x < 0.0 && (n % 2) != 0) sign = -sign;
    const double ax = std::abs(x);

    if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
    if (ax < 1e-6) {
        // leading two series terms; the next one is O(x^4) relative
        const double half = 0.5 * ax;
        double lead = 1.0;
        for (int k = 1; k <= n; ++k) lead *= half / k;
        return sign * lead * (1.0 - half * half / (n + 1));
    }

    const double scale_point = std::max(static_cast<double>(n), ax);
    int start = static_cast<int>(scale_point) + 20 + static_cast<int>(std::sqrt(160.0 * scale_point));
    start += start % 2;  // even start keeps the normalization sum aligned

    constexpr double kRescaleAbove = 1e250;
    constexpr double kRescaleFactor = 1e-250;

    double upper = 0.0;    // J_{k+1}
    double current = 1e-300;  // J_k, arbitrary seed
    double norm_sum = 0.0;    // 2 * sum of even-order terms above 0
    double result = 0.0;
    const double two_over_x = 2.0 / ax;

    for (int k = start; k > 0; --k) {
        const double lower = k * two_over_x * current - upper;  // J_{k-1}
        upper = current;
        current = lower;
        if (std::abs(current) > kRescaleAbove) {
            current *= kRescaleFactor;
            upper *= kRescaleFactor;
            norm_sum *= kRescaleFactor;
            result *= kRescaleFactor;
        }
        const int order_now = k - 1;
        if (order_now == n) result = current;
        if (order_now > 0 && order_now % 2 == 0) norm_sum += 2.0 * current;
    }
    // current now holds J_0 (unnormalized)
    const double norm = current + norm_sum;
    if (!std::isfinite(norm) || norm == 0.0) throw ConvergenceError("Bessel normalization failed");
    return sign * result / norm;
}

}  // namespace bloch_qst
