#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace trialbf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) noexcept {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) noexcept {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf || !std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// ln(1 - exp(x)) for x <= 0, accurate at both ends.
inline double log1m_exp(double x) noexcept {
    return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

}  // namespace trialbf
