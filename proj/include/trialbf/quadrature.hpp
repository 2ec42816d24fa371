#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of exp(f) where f is supplied in
// log space. Infinite ranges are mapped onto finite ones:
//
//   (-inf, +inf):  x = tan(theta),         theta in (-pi/2, pi/2)
//   (a, +inf):     x = a + u / (1 - u),    u in [0, 1)
//   (-inf, b):     x = b - u / (1 - u),    u in [0, 1)
//
// Each panel keeps its own log scale (the largest log-integrand value on its
// nodes); panel sums are combined with log-sum-exp, so integrals far below
// the double range are still returned accurately as logarithms.
//
// Before subdividing, the mode of the transformed log-integrand is located by
// a coarse scan plus golden-section refinement and the initial partition is
// seeded geometrically around it. This keeps narrow posterior peaks from
// being missed by the first Kronrod pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "trialbf/errors.hpp"
#include "trialbf/logmath.hpp"

namespace trialbf {

struct Interval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    static constexpr Interval whole_line() noexcept { return {}; }

    bool contains(double x) const noexcept { return x >= lower && x <= upper; }
    bool is_finite() const noexcept { return std::isfinite(lower) && std::isfinite(upper); }

    void validate() const {
        if (std::isnan(lower) || std::isnan(upper) || !(lower < upper))
            throw DomainError("interval requires lower < upper");
    }
};

struct QuadratureSettings {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;  // on the integral scaled by exp(max log-integrand)
    int max_subdivisions = 2000;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
        if (!(abs_tol >= 0.0)) throw DomainError("abs_tol must be non-negative");
        if (max_subdivisions < 1) throw DomainError("max_subdivisions must be >= 1");
    }
};

struct QuadratureResult {
    double log_value = kNegInf;  // ln of the integral
    double log_error = kNegInf;  // ln of the absolute error estimate
    int panels = 0;
};

namespace detail {

// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss points.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class RangeKind { finite, upper_infinite, lower_infinite, both_infinite };

// Maps the integration variable u of the finite working range back to x and
// returns the log Jacobian dx/du.
struct RangeMap {
    RangeKind kind;
    double anchor = 0.0;
    double u_lo = 0.0;
    double u_hi = 1.0;

    explicit RangeMap(const Interval& r) {
        const bool lo_inf = std::isinf(r.lower);
        const bool hi_inf = std::isinf(r.upper);
        if (!lo_inf && !hi_inf) {
            kind = RangeKind::finite;
            u_lo = r.lower;
            u_hi = r.upper;
        } else if (!lo_inf) {
            kind = RangeKind::upper_infinite;
            anchor = r.lower;
        } else if (!hi_inf) {
            kind = RangeKind::lower_infinite;
            anchor = r.upper;
        } else {
            kind = RangeKind::both_infinite;
            u_lo = -std::numbers::pi / 2;
            u_hi = std::numbers::pi / 2;
        }
    }

    std::pair<double, double> operator()(double u) const noexcept {
        switch (kind) {
            case RangeKind::finite:
                return {u, 0.0};
            case RangeKind::upper_infinite:
                return {anchor + u / (1.0 - u), -2.0 * std::log1p(-u)};
            case RangeKind::lower_infinite:
                return {anchor - u / (1.0 - u), -2.0 * std::log1p(-u)};
            case RangeKind::both_infinite:
            default:
                return {std::tan(u), -2.0 * std::log(std::cos(u))};
        }
    }

    double to_u(double x) const noexcept {
        switch (kind) {
            case RangeKind::finite:
                return x;
            case RangeKind::upper_infinite:
                return (x - anchor) / (1.0 + (x - anchor));
            case RangeKind::lower_infinite:
                return (anchor - x) / (1.0 + (anchor - x));
            case RangeKind::both_infinite:
            default:
                return std::atan(x);
        }
    }
};

struct Panel {
    double a;
    double b;
    double log_value;
    double log_error;
    double log_max;  // largest log-integrand value on the panel's nodes
};

struct PanelOrder {
    bool operator()(const Panel& l, const Panel& r) const noexcept { return l.log_error < r.log_error; }
};

template <class G>
Panel kronrod_panel(const G& g, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> logs{};
    logs[7] = g(center);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        logs[i] = g(center - dx);
        logs[14 - i] = g(center + dx);
    }
    double m = kNegInf;
    for (double v : logs) {
        if (std::isnan(v)) throw NumericalError("log-integrand returned NaN");
        m = std::max(m, v);
    }
    if (m == kNegInf) return {a, b, kNegInf, kNegInf, kNegInf};
    if (m == std::numeric_limits<double>::infinity())
        throw NumericalError("log-integrand returned +inf");

    double kronrod = kKronrodWeights[7] * std::exp(logs[7] - m);
    double gauss = kGaussWeights[3] * std::exp(logs[7] - m);
    for (int i = 0; i < 7; ++i) {
        const double pair = std::exp(logs[i] - m) + std::exp(logs[14 - i] - m);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    const double err = std::abs(kronrod - gauss) + 50.0 * std::numeric_limits<double>::epsilon() * kronrod;
    const double log_half = std::log(half);
    return {a, b, m + log_half + std::log(kronrod), err > 0 ? m + log_half + std::log(err) : kNegInf, m};
}

// Coarse scan plus golden-section refinement of the transformed log-integrand
// on (lo, hi). Returns the arg-max and a length scale for seeding breakpoints.
template <class G>
std::pair<double, double> locate_mode(const G& g, double lo, double hi) {
    constexpr int kScan = 65;
    const double step = (hi - lo) / kScan;
    int best = 0;
    double best_val = kNegInf;
    for (int i = 0; i < kScan; ++i) {
        const double v = g(lo + (i + 0.5) * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best_val == kNegInf) return {0.5 * (lo + hi), hi - lo};

    double a = best == 0 ? lo : lo + (best - 0.5) * step;
    double b = best == kScan - 1 ? hi : lo + (best + 1.5) * step;
    constexpr double kInvPhi = 0.6180339887498948482;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - kInvPhi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + kInvPhi * (b - a);
            gd = g(d);
        }
    }
    const double mode = 0.5 * (a + b);

    // Curvature-based width; fall back to the scan spacing.
    double width = step;
    const double h = std::max(1e-6 * (hi - lo), 1e-9);
    if (mode - h > lo && mode + h < hi) {
        const double gm = g(mode);
        const double curv = (g(mode + h) - 2.0 * gm + g(mode - h)) / (h * h);
        if (std::isfinite(curv) && curv < 0.0) width = std::min(step, 1.0 / std::sqrt(-curv));
    }
    return {mode, width};
}

}  // namespace detail

/// ln of the integral of exp(log_f) over `region`. When `breakpoints` is
/// empty the initial partition is seeded around a numerically located mode;
/// otherwise the supplied points (in x, outside points ignored) are used.
template <class F>
QuadratureResult integrate_log_detailed(F&& log_f, const Interval& region, const QuadratureSettings& settings = {},
                                        std::span<const double> breakpoints = {}) {
    region.validate();
    settings.validate();
    const detail::RangeMap map(region);

    auto g = [&](double u) -> double {
        const auto [x, log_jac] = map(u);
        if (!std::isfinite(x)) return kNegInf;
        const double v = log_f(x);
        return v == kNegInf ? kNegInf : v + log_jac;
    };

    std::vector<double> cuts{map.u_lo, map.u_hi};
    if (breakpoints.empty()) {
        const auto [mode, width] = detail::locate_mode(g, map.u_lo, map.u_hi);
        cuts.push_back(mode);
        for (double k = 1.0; k <= 1024.0; k *= 2.0) {
            cuts.push_back(mode - k * width);
            cuts.push_back(mode + k * width);
        }
    } else {
        for (double x : breakpoints)
            if (x > region.lower && x < region.upper) cuts.push_back(map.to_u(x));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                              [&](double u) { return !(u >= map.u_lo && u <= map.u_hi); }),
               cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double l, double r) { return r - l <= 1e-14 * (1.0 + std::abs(l)); }),
               cuts.end());
    if (cuts.size() < 2) cuts = {map.u_lo, map.u_hi};

    std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> heap;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) heap.push(detail::kronrod_panel(g, cuts[i], cuts[i + 1]));

    const double log_rel = std::log(settings.rel_tol);
    const double log_abs = settings.abs_tol > 0 ? std::log(settings.abs_tol) : kNegInf;
    std::vector<double> values;
    std::vector<double> errors;
    QuadratureResult out;
    double log_peak = kNegInf;

    for (int iter = 0;; ++iter) {
        // Totals are recomputed from scratch to avoid drift.
        values.clear();
        errors.clear();
        auto panels = heap;
        while (!panels.empty()) {
            values.push_back(panels.top().log_value);
            errors.push_back(panels.top().log_error);
            log_peak = std::max(log_peak, panels.top().log_max);
            panels.pop();
        }
        out.log_value = log_sum_exp(values);
        out.log_error = log_sum_exp(errors);
        out.panels = static_cast<int>(heap.size());

        const double allowed = std::max(log_rel + out.log_value, log_abs + log_peak);
        if (out.log_error <= allowed || out.log_error == kNegInf) return out;

        if (out.panels >= settings.max_subdivisions) break;
        const detail::Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // panel at floating-point resolution
        heap.pop();
        heap.push(detail::kronrod_panel(g, worst.a, mid));
        heap.push(detail::kronrod_panel(g, mid, worst.b));
    }

    std::ostringstream msg;
    msg << "quadrature did not converge after " << out.panels << " panels (log estimate " << out.log_value
        << ", log error " << out.log_error << ")";
    throw QuadratureError(msg.str(), out.log_value, std::exp(out.log_error - out.log_value));
}

template <class F>
double integrate_log(F&& log_f, const Interval& region, const QuadratureSettings& settings = {},
                     std::span<const double> breakpoints = {}) {
    return integrate_log_detailed(std::forward<F>(log_f), region, settings, breakpoints).log_value;
}

}  // namespace trialbf
