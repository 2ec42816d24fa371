#pragma once

// Study inputs and their reduction to the two-sample t sufficient statistics.
// "x" is always the control group and "y" the experimental group; effects are
// oriented as y - x.

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trialbf/errors.hpp"
#include "trialbf/specfun.hpp"

namespace trialbf {

struct RawGroups {
    std::vector<double> x;  // control
    std::vector<double> y;  // experimental
};

struct SummaryMoments {
    int n_x = 0;
    int n_y = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double sd_x = 0.0;
    double sd_y = 0.0;
};

/// Group sizes and means plus the half-width of a confidence interval for
/// mean_y - mean_x, assumed symmetric and computed under the pooled-variance
/// t model with n_x + n_y - 2 degrees of freedom.
struct SummaryCi {
    int n_x = 0;
    int n_y = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double ci_margin = 0.0;
    double ci_level = 0.95;
};

using StudyInput = std::variant<RawGroups, SummaryMoments, SummaryCi>;

enum class InputMode { raw, summary_moments, summary_ci };

inline std::string_view to_string(InputMode m) noexcept {
    switch (m) {
        case InputMode::raw:
            return "raw";
        case InputMode::summary_moments:
            return "summary-moments";
        case InputMode::summary_ci:
        default:
            return "summary-ci";
    }
}

inline InputMode input_mode(const StudyInput& in) noexcept {
    return static_cast<InputMode>(in.index());
}

struct DerivedStats {
    double df = 0.0;         // n_x + n_y - 2
    double sd_pooled = 0.0;  // outcome units
    double n_eff = 0.0;      // n_x n_y / (n_x + n_y)
    double t_obs = 0.0;      // (mean_y - mean_x) / (sd_pooled sqrt(1/n_x + 1/n_y))
    double mean_diff = 0.0;  // mean_y - mean_x, outcome units

    /// Observed standardized effect (mean_y - mean_x) / sd_pooled.
    double effect_size() const noexcept { return t_obs / std::sqrt(n_eff); }

    void validate() const {
        if (!(df > 0.0) || !(sd_pooled > 0.0) || !(n_eff > 0.0) || !std::isfinite(t_obs))
            throw ValidationError("derived statistics are not valid");
    }
};

namespace detail {

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be a finite number");
}

inline void validate_sizes(int n_x, int n_y) {
    if (n_x < 2 || n_y < 2) throw ValidationError("each group needs at least 2 observations");
}

inline DerivedStats stats_from(int n_x, int n_y, double mean_x, double mean_y, double sd_pooled) {
    DerivedStats s;
    const double nx = n_x;
    const double ny = n_y;
    s.df = nx + ny - 2.0;
    s.sd_pooled = sd_pooled;
    s.n_eff = nx * ny / (nx + ny);
    s.mean_diff = mean_y - mean_x;
    s.t_obs = s.mean_diff / (sd_pooled * std::sqrt(1.0 / nx + 1.0 / ny));
    return s;
}

struct SampleMoments {
    double mean;
    double sd;
};

// Two-pass mean and n - 1 standard deviation.
inline SampleMoments sample_moments(const std::vector<double>& v) {
    double sum = 0.0;
    for (double e : v) sum += e;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    double comp = 0.0;
    for (double e : v) {
        ss += (e - mean) * (e - mean);
        comp += e - mean;
    }
    ss -= comp * comp / static_cast<double>(v.size());
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

inline void validate(const SummaryMoments& s) {
    detail::validate_sizes(s.n_x, s.n_y);
    detail::require_finite(s.mean_x, "mean_x");
    detail::require_finite(s.mean_y, "mean_y");
    detail::require_finite(s.sd_x, "sd_x");
    detail::require_finite(s.sd_y, "sd_y");
    if (!(s.sd_x > 0.0) || !(s.sd_y > 0.0)) throw ValidationError("standard deviations must be positive");
}

inline void validate(const SummaryCi& s) {
    detail::validate_sizes(s.n_x, s.n_y);
    if (s.n_x + s.n_y < 5) throw ValidationError("CI input needs n_x + n_y >= 5 (df >= 3); supply sds instead");
    detail::require_finite(s.mean_x, "mean_x");
    detail::require_finite(s.mean_y, "mean_y");
    detail::require_finite(s.ci_margin, "ci_margin");
    if (!(s.ci_margin > 0.0)) throw ValidationError("ci_margin must be positive");
    if (!(s.ci_level > 0.0 && s.ci_level < 1.0)) throw ValidationError("ci_level must lie strictly between 0 and 1");
}

inline void validate(const RawGroups& r) {
    if (r.x.size() < 2 || r.y.size() < 2) throw ValidationError("each group needs at least 2 observations");
    for (double v : r.x) detail::require_finite(v, "observation in x");
    for (double v : r.y) detail::require_finite(v, "observation in y");
}

/// sqrt(((n_x - 1) sd_x^2 + (n_y - 1) sd_y^2) / (n_x + n_y - 2)).
inline double pooled_sd(const SummaryMoments& s) {
    validate(s);
    const double nx = s.n_x;
    const double ny = s.n_y;
    const double v = ((nx - 1.0) * s.sd_x * s.sd_x + (ny - 1.0) * s.sd_y * s.sd_y) / (nx + ny - 2.0);
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("pooled variance is degenerate");
    return std::sqrt(v);
}

/// Pooled SD implied by a CI half-width: SE = margin / t_{(1+level)/2, df},
/// sd = SE / sqrt(1/n_x + 1/n_y).
inline double sd_from_ci(const SummaryCi& s) {
    validate(s);
    const double df = static_cast<double>(s.n_x) + s.n_y - 2.0;
    const double se = s.ci_margin / student_t_quantile(0.5 * (1.0 + s.ci_level), df);
    return se / std::sqrt(1.0 / s.n_x + 1.0 / s.n_y);
}

inline SummaryMoments to_moments(const RawGroups& r) {
    validate(r);
    const auto mx = detail::sample_moments(r.x);
    const auto my = detail::sample_moments(r.y);
    SummaryMoments s{static_cast<int>(r.x.size()), static_cast<int>(r.y.size()), mx.mean, my.mean, mx.sd, my.sd};
    if (!(s.sd_x > 0.0) || !(s.sd_y > 0.0)) throw ValidationError("a group has zero sample variance");
    return s;
}

inline DerivedStats derive_stats(const SummaryMoments& s) {
    return detail::stats_from(s.n_x, s.n_y, s.mean_x, s.mean_y, pooled_sd(s));
}

inline DerivedStats derive_stats(const SummaryCi& s) {
    return detail::stats_from(s.n_x, s.n_y, s.mean_x, s.mean_y, sd_from_ci(s));
}

inline DerivedStats derive_stats(const RawGroups& r) { return derive_stats(to_moments(r)); }

inline DerivedStats derive_stats(const StudyInput& in) {
    return std::visit([](const auto& v) { return derive_stats(v); }, in);
}

/// Converts a margin to standardized (effect-size) units.
inline double standardize_margin(double value, bool is_standardized, const DerivedStats& stats) {
    stats.validate();
    detail::require_finite(value, "margin");
    return is_standardized ? value : value / stats.sd_pooled;
}

}  // namespace trialbf
