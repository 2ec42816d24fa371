#pragma once

// Special functions and densities, all evaluated in log space.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "trialbf/errors.hpp"
#include "trialbf/logmath.hpp"
#include "trialbf/quadrature.hpp"

namespace trialbf {

/// Natural-log density value.
struct LogDensity {
    double value = kNegInf;

    double linear() const noexcept { return std::exp(value); }
    friend bool operator==(const LogDensity&, const LogDensity&) = default;
};

namespace detail {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// zeta(k) for k = 2..31, coefficients of the Taylor series of lnGamma(1 + e).
inline constexpr std::array<double, 30> kZeta = {
    1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915, 1.0369277551433699263,
    1.0173430619844491397, 1.0083492773819228268, 1.0040773561979443394, 1.0020083928260822144,
    1.0009945751278180853, 1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
    1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519, 1.0000076371976378998,
    1.0000038172932649998, 1.0000019082127165539, 1.0000009539620338728, 1.0000004769329867878,
    1.0000002384505027277, 1.0000001192199259653, 1.0000000596081890513, 1.0000000298035035147,
    1.0000000149015548284, 1.0000000074507117898, 1.0000000037253340248, 1.0000000018626597235,
    1.0000000009313274324, 1.0000000004656629065};

// lnGamma(1 + e) for |e| <= 0.25: -gamma*e + sum_k (-1)^k zeta(k) e^k / k.
inline double log_gamma_near_one(double e) noexcept {
    double sum = 0.0;
    double pw = -e;
    for (std::size_t i = 0; i < kZeta.size(); ++i) {
        pw *= -e;
        sum += kZeta[i] * pw / static_cast<double>(i + 2);
    }
    return -kEulerGamma * e + sum;
}

// Stirling series remainder sum_k B_2k / (2k (2k-1) z^(2k-1)), valid for z >= 10.
inline double stirling_series(double z) noexcept {
    const double r = 1.0 / z;
    const double r2 = r * r;
    return r * (1.0 / 12 +
                r2 * (-1.0 / 360 +
                      r2 * (1.0 / 1260 +
                            r2 * (-1.0 / 1680 + r2 * (1.0 / 1188 + r2 * (-691.0 / 360360 + r2 * (1.0 / 156)))))));
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
///
/// x >= 10 uses the Stirling series (7 Bernoulli terms). Near the zeros at
/// x = 1 and x = 2 the Taylor series in zeta values is used so the result
/// keeps relative accuracy. Elsewhere the argument is shifted above 10 with
/// the recurrence Gamma(x + 1) = x Gamma(x).
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
    if (std::isinf(x)) return x;
    if (std::abs(x - 1.0) <= 0.25) return detail::log_gamma_near_one(x - 1.0);
    if (std::abs(x - 2.0) <= 0.25) return detail::log_gamma_near_one(x - 2.0) + std::log1p(x - 2.0);
    if (x >= 10.0) return (x - 0.5) * std::log(x) - x + detail::kHalfLog2Pi + detail::stirling_series(x);
    double shifted = x;
    double product = 1.0;
    while (shifted < 10.0) {
        product *= shifted;
        shifted += 1.0;
    }
    return (shifted - 0.5) * std::log(shifted) - shifted + detail::kHalfLog2Pi + detail::stirling_series(shifted) -
           std::log(product);
}

/// lnGamma(z) - [(z - 1/2) ln z - z + ln sqrt(2 pi)], the Stirling remainder.
inline double stirling_correction(double z) {
    if (!(z > 0.0)) throw DomainError("stirling_correction requires z > 0");
    if (z >= 10.0) return detail::stirling_series(z);
    return log_gamma(z) - ((z - 0.5) * std::log(z) - z + detail::kHalfLog2Pi);
}

/// lnGamma(z + 1/2) - lnGamma(z) without cancellation for large z.
inline double log_gamma_half_ratio(double z) {
    if (!(z > 0.0)) throw DomainError("log_gamma_half_ratio requires z > 0");
    if (z < 10.0) return log_gamma(z + 0.5) - log_gamma(z);
    return z * std::log1p(0.5 / z) - 0.5 + 0.5 * std::log(z) + detail::stirling_series(z + 0.5) -
           detail::stirling_series(z);
}

/// Student t log density with df degrees of freedom.
inline LogDensity central_t_logpdf(double t, double df) {
    if (!(df > 0.0)) throw DomainError("central_t_logpdf requires df > 0");
    const double norm = log_gamma_half_ratio(0.5 * df) - 0.5 * std::log(df * std::numbers::pi);
    return {norm - 0.5 * (df + 1.0) * std::log1p(t * t / df)};
}

/// Noncentral t log density.
///
/// Evaluated from the scale mixture T = (Z + ncp) / S with S = sqrt(V / df),
/// V ~ chi-squared(df):
///
///   f(t) = 2 z^z / Gamma(z) / sqrt(2 pi) * Int_0^inf s^df exp(-z s^2 - (t s - ncp)^2 / 2) ds,   z = df / 2.
///
/// After pulling the Stirling terms out of the constant, the log integrand is
///   df (ln s - (s^2 - 1) / 2) - (t s - ncp)^2 / 2,
/// which is strictly concave in s with curvature at most -(df + t^2) and a
/// closed-form maximiser. The integral runs over the mode +- 40 curvature
/// widths (clipped at s = 0), where the dropped mass is below exp(-800) of
/// the peak.
inline LogDensity noncentral_t_logpdf(double t, double df, double ncp) {
    if (!(df > 0.0)) throw DomainError("noncentral_t_logpdf requires df > 0");
    if (std::isnan(t) || std::isnan(ncp)) throw DomainError("noncentral_t_logpdf requires finite arguments");
    if (std::isinf(t) || std::isinf(ncp)) return {kNegInf};

    const double z = 0.5 * df;
    const double log_const = std::numbers::ln2 + 0.5 * std::log(z) - 2.0 * detail::kHalfLog2Pi - stirling_correction(z);

    const double a = df + t * t;
    const double tn = t * ncp;
    const double root = std::sqrt(tn * tn + 4.0 * df * a);
    const double mode = tn >= 0.0 ? (tn + root) / (2.0 * a) : 2.0 * df / (root - tn);
    const double local_width = 1.0 / std::sqrt(df / (mode * mode) + a);
    const double global_width = 1.0 / std::sqrt(a);

    // k(s) - k(mode), expanded about the mode. The terms linear in d = s - mode
    // vanish by stationarity (df / mode - df mode - t (t mode - ncp) = 0), and
    // dropping them analytically avoids cancelling two O(t ncp) quantities.
    auto k_at = [&](double s) {
        const double e = s - 1.0;
        const double r = t * s - ncp;
        return df * (std::log1p(e) - e - 0.5 * e * e) - 0.5 * r * r;
    };
    const double k_mode = k_at(mode);
    // Integrated over d = s - mode directly so node placement keeps full
    // precision when the mode sits far from 1.
    auto log_integrand = [&](double d) {
        const double u = d / mode;
        if (u <= -1.0) return kNegInf;
        return df * (std::log1p(u) - u) - 0.5 * a * d * d;
    };

    const Interval range{std::max(-mode, -40.0 * global_width), 40.0 * global_width};
    const std::array<double, 9> seeds = {-20 * local_width, -8 * local_width, -3 * local_width,
                                         -local_width,      0.0,
                                         local_width,       3 * local_width,
                                         8 * local_width,   20 * local_width};
    const QuadratureSettings settings{1e-13, 0.0, 400};
    const double log_integral = k_mode + integrate_log(log_integrand, range, settings, seeds);
    return {log_const + log_integral};
}

/// Location-zero Cauchy log density.
inline LogDensity cauchy_logpdf(double x, double scale) {
    if (!(scale > 0.0)) throw DomainError("cauchy_logpdf requires scale > 0");
    const double u = x / scale;
    return {-std::log(std::numbers::pi * scale) - std::log1p(u * u)};
}

/// Location-zero Cauchy CDF; the lower tail keeps full relative accuracy.
inline double cauchy_cdf(double x, double scale) {
    if (!(scale > 0.0)) throw DomainError("cauchy_cdf requires scale > 0");
    if (std::isnan(x)) throw DomainError("cauchy_cdf requires a number");
    if (x <= 0.0) return std::atan2(scale, -x) / std::numbers::pi;
    return 1.0 - std::atan2(scale, x) / std::numbers::pi;
}

/// P(lower < X < upper) for a location-zero Cauchy, accurate in either tail.
inline double cauchy_interval_mass(double lower, double upper, double scale) {
    if (!(scale > 0.0)) throw DomainError("cauchy_interval_mass requires scale > 0");
    if (!(lower <= upper)) throw DomainError("cauchy_interval_mass requires lower <= upper");
    if (lower >= 0.0) return (std::atan2(scale, lower) - std::atan2(scale, upper)) / std::numbers::pi;
    if (upper <= 0.0) return (std::atan2(scale, -upper) - std::atan2(scale, -lower)) / std::numbers::pi;
    return 1.0 - cauchy_cdf(lower, scale) - cauchy_cdf(-upper, scale);
}

namespace detail {

// I_x(a, b) with the complement y = 1 - x and both logarithms supplied by the
// caller. With a or b near 1e9 the prefactor x^a y^b amplifies any rounding
// in ln y, so callers that know ln y analytically (t CDF) pass it in.
inline double incomplete_beta_xy(double x, double y, double log_x, double log_y, double a, double b) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return 1.0;

    auto log_beta_of = [](double p, double q) {
        if (q == 0.5) return log_gamma(0.5) - log_gamma_half_ratio(p);
        if (p == 0.5) return log_gamma(0.5) - log_gamma_half_ratio(q);
        return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
    };

    // Positive-term series sum_n (a+b)_n / (a+1)_n x^n. Used past the
    // continued fraction's switch point when x is small: there the swapped
    // fraction works with x near 1 and is badly conditioned for huge a + b.
    const bool past_switch = x > (a + 1.0) / (a + b + 2.0);
    if (past_switch && x <= 0.5 && (a + b) * x <= 1e4) {
        double sum = 0.0;
        double term = 1.0;
        for (int n = 0; n < 200000; ++n) {
            sum += term;
            term *= (a + b + n) / (a + 1.0 + n) * x;
            if (term < 1e-17 * sum && n > (a + b) * x) break;
        }
        return std::exp(a * log_x + b * log_y - log_beta_of(a, b) - std::log(a)) * sum;
    }

    const bool swap = past_switch;
    if (swap) {
        std::swap(a, b);
        std::swap(x, y);
        std::swap(log_x, log_y);
    }

    const double log_front = a * log_x + b * log_y - log_beta_of(a, b) - std::log(a);

    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double f = d;
    int m = 1;
    for (; m <= 100000; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        f *= d * c;

        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    if (m > 100000) throw NumericalError("incomplete_beta continued fraction did not converge");
    const double front = std::exp(log_front) * f;
    return swap ? 1.0 - front : front;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta requires a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta requires 0 <= x <= 1");
    return detail::incomplete_beta_xy(x, 1.0 - x, std::log(x), std::log1p(-x), a, b);
}

/// Student t CDF.
inline double student_t_cdf(double q, double df) {
    if (!(df > 0.0)) throw DomainError("student_t_cdf requires df > 0");
    if (std::isnan(q)) throw DomainError("student_t_cdf requires a number");
    if (std::isinf(q)) return q > 0 ? 1.0 : 0.0;
    const double q2 = q * q;
    double tail;  // P(T > |q|)
    const double x = q2 / (df + q2);
    const double y = df / (df + q2);
    const double log_y = -std::log1p(q2 / df);
    const double log_x = std::log(q2 / df) + log_y;
    if (q2 < df) {
        tail = 0.5 - 0.5 * detail::incomplete_beta_xy(x, y, log_x, log_y, 0.5, 0.5 * df);
    } else {
        tail = 0.5 * detail::incomplete_beta_xy(y, x, log_y, log_x, 0.5 * df, 0.5);
    }
    return q >= 0.0 ? 1.0 - tail : tail;
}

/// Student t quantile: root of student_t_cdf(q, df) = p by safeguarded
/// Newton iteration inside a bisection bracket.
inline double student_t_quantile(double p, double df) {
    if (!(df > 0.0)) throw DomainError("student_t_quantile requires df > 0");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile requires 0 < p < 1");
    if (p == 0.5) return 0.0;
    const bool upper = p > 0.5;
    const double target = upper ? p : 1.0 - p;  // solve in the upper half, then reflect

    double lo = 0.0;
    double hi = 1.0;
    while (student_t_cdf(hi, df) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("student_t_quantile bracket overflow");
    }
    double q = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double diff = student_t_cdf(q, df) - target;
        if (std::abs(diff) <= 1e-15) break;
        if (diff > 0.0)
            hi = q;
        else
            lo = q;
        const double step = diff / central_t_logpdf(q, df).linear();
        double next = q - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - q) <= 1e-16 * std::abs(q)) {
            q = next;
            break;
        }
        q = next;
    }
    return upper ? q : -q;
}

}  // namespace trialbf
