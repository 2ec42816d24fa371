#pragma once

// Console and JSON rendering of Bayes factor results, plus prior/posterior
// density curves as CSV.

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trialbf/engine.hpp"

namespace trialbf {

enum class OutputFormat { text, json };

struct ReportOptions {
    OutputFormat format = OutputFormat::text;
    int significant_digits = 3;
    int curve_points = 512;

    void validate() const {
        if (significant_digits < 2 || significant_digits > 10)
            throw ValidationError("significant digits must lie in [2, 10]");
        if (curve_points < 2) throw ValidationError("curve points must be at least 2");
    }
};

inline constexpr int kJsonSchemaVersion = 1;
inline constexpr std::string_view kCiDfConvention = "pooled";

namespace detail {

inline constexpr int kLabelWidth = 30;

inline std::string printf_string(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v + 0.0);
    return buf;
}

// Scientific notation straight from the logarithm, for values exp() cannot hold.
inline std::string scientific_from_log10(double log10_v, int digits) {
    double e = std::floor(log10_v);
    double m = std::pow(10.0, log10_v - e);
    const double unit = std::pow(10.0, digits - 1);
    m = std::round(m * unit) / unit;
    if (m >= 10.0) {
        m /= 10.0;
        e += 1.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fe%+03.0f", digits - 1, m, e);
    return buf;
}

inline std::string line(std::string_view label, std::string_view value) {
    std::string s(label);
    if (s.size() < kLabelWidth) s.append(kLabelWidth - s.size(), ' ');
    s.append(value);
    s.push_back('\n');
    return s;
}

inline std::string continuation(std::string_view value) { return line("", value); }

inline std::string design_title(Design d) {
    switch (d) {
        case Design::superiority:
            return "Superiority analysis";
        case Design::non_inferiority:
            return "Non-inferiority analysis";
        case Design::equivalence:
        default:
            return "Equivalence analysis";
    }
}

inline std::string design_tag(Design d) {
    switch (d) {
        case Design::superiority:
            return "superiority";
        case Design::non_inferiority:
            return "non-inferiority";
        case Design::equivalence:
        default:
            return "equivalence";
    }
}

inline std::string bf_label(Orientation o) { return o == Orientation::bf10 ? "BF10" : "BF01"; }

inline std::string data_label(InputMode m) { return m == InputMode::raw ? "raw data" : "summary data"; }

}  // namespace detail

/// Scientific notation at `digits` significant digits when |log10 BF| >= 4,
/// otherwise fixed-point with two decimals.
inline std::string format_bf(double log_bf, int digits = 3) {
    if (std::isnan(log_bf)) return "nan";
    const double log10_bf = log_bf / std::numbers::ln10;
    const double bf = std::exp(log_bf);
    if (std::abs(log10_bf) < 4.0) return detail::fixed(bf, 2);
    if (std::isfinite(bf) && bf > 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*e", digits - 1, bf);
        return buf;
    }
    return detail::scientific_from_log10(log10_bf, digits);
}

inline std::string render_text(const BfResult& r, const ReportOptions& opt = {}) {
    opt.validate();
    using detail::continuation;
    using detail::fixed;
    using detail::line;
    const std::string stars(30, '*');
    const std::string title = detail::design_title(r.design);
    const bool low = r.direction == Direction::low;

    std::string out;
    out += stars + "\n";
    out += title + "\n";
    out += std::string(title.size(), '-') + "\n";
    out += line("Data:", detail::data_label(r.input_mode));

    switch (r.design) {
        case Design::superiority: {
            out += line("H0 (non-superiority):", "mu_y == mu_x");
            std::string h1 = "mu_y != mu_x";
            if (r.alternative == Alternative::one_sided) h1 = low ? "mu_y < mu_x" : "mu_y > mu_x";
            out += line("H1 (superiority):", h1);
            break;
        }
        case Design::non_inferiority: {
            out += line("H0 (inferiority):", low ? "mu_y - mu_x > ni_margin" : "mu_y - mu_x < -ni_margin");
            out += line("H1 (non-inferiority):", low ? "mu_y - mu_x < ni_margin" : "mu_y - mu_x > -ni_margin");
            out += line("Non-inferiority margin:", fixed(r.ni_margin_std.value_or(0.0), 2) + " (standardised)");
            out += continuation(fixed(r.ni_margin_unstd.value_or(0.0), 2) + " (unstandardised)");
            break;
        }
        case Design::equivalence: {
            const auto s = r.interval_std.value_or(std::array<double, 2>{0.0, 0.0});
            const auto u = r.interval_unstd.value_or(std::array<double, 2>{0.0, 0.0});
            if (s[0] == 0.0 && s[1] == 0.0) {
                out += line("H0 (equivalence):", "mu_y == mu_x");
                out += line("H1 (non-equivalence):", "mu_y != mu_x");
            } else {
                const std::string lo = fixed(s[0], 2);
                const std::string hi = fixed(s[1], 2);
                out += line("H0 (equivalence):", lo + " < delta < " + hi);
                out += line("H1 (non-equivalence):", "delta < " + lo + " OR delta > " + hi);
            }
            out += line("Equivalence interval:",
                        "Lower = " + fixed(s[0], 2) + "; Upper = " + fixed(s[1], 2) + " (standardised)");
            out += continuation("Lower = " + fixed(u[0], 2) + "; Upper = " + fixed(u[1], 2) + " (unstandardised)");
            break;
        }
    }
    out += line("Cauchy prior scale:", fixed(r.prior_scale, 3));
    out += "\n";
    out += "    " + detail::bf_label(r.orientation) + " (" + detail::design_tag(r.design) +
           ") = " + format_bf(r.log_bf, opt.significant_digits) + "\n";
    out += stars + "\n";
    return out;
}

namespace detail {

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline nlohmann::json result_body(const BfResult& r) {
    nlohmann::json j;
    j["design"] = to_string(r.design);
    j["direction"] = to_string(r.direction);
    j["alternative"] = to_string(r.alternative);
    j["orientation"] = to_string(r.orientation);
    j["input_mode"] = to_string(r.input_mode);
    j["prior_scale"] = r.prior_scale;
    j["log_bf"] = number_or_null(r.log_bf);
    j["bf"] = number_or_null(get_bf(r));
    j["ci_df_convention"] = kCiDfConvention;
    j["stats"] = {{"df", r.stats.df},       {"sd_pooled", r.stats.sd_pooled}, {"n_eff", r.stats.n_eff},
                  {"t_obs", r.stats.t_obs}, {"mean_diff", r.stats.mean_diff}, {"effect_size", r.stats.effect_size()}};
    if (r.ni_margin_std)
        j["ni_margin"] = {{"standardized", *r.ni_margin_std}, {"unstandardized", r.ni_margin_unstd.value_or(0.0)}};
    else
        j["ni_margin"] = nullptr;
    if (r.interval_std)
        j["interval"] = {{"standardized", *r.interval_std},
                         {"unstandardized", r.interval_unstd.value_or(std::array<double, 2>{0.0, 0.0})}};
    else
        j["interval"] = nullptr;
    return j;
}

template <class E>
E enum_from(const nlohmann::json& j, std::initializer_list<E> values) {
    const std::string s = j.get<std::string>();
    for (E v : values)
        if (to_string(v) == s) return v;
    throw ValidationError("unknown enum value '" + s + "' in result JSON");
}

}  // namespace detail

/// Schema v1 record for a single result. Doubles are written in shortest
/// round-trip form.
inline std::string render_json(const BfResult& r) {
    nlohmann::json j;
    j["schema_version"] = kJsonSchemaVersion;
    j["kind"] = "result";
    j["result"] = detail::result_body(r);
    return j.dump(2) + "\n";
}

/// Inverse of render_json.
inline BfResult parse_result_json(std::string_view text) {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("schema_version").get<int>() != kJsonSchemaVersion) throw ValidationError("unsupported schema version");
    const auto& j = doc.at("result");
    BfResult r;
    r.design = detail::enum_from(j.at("design"), {Design::superiority, Design::non_inferiority, Design::equivalence});
    r.direction = detail::enum_from(j.at("direction"), {Direction::high, Direction::low});
    r.alternative = detail::enum_from(j.at("alternative"), {Alternative::one_sided, Alternative::two_sided});
    r.orientation = detail::enum_from(j.at("orientation"), {Orientation::bf10, Orientation::bf01});
    r.input_mode =
        detail::enum_from(j.at("input_mode"), {InputMode::raw, InputMode::summary_moments, InputMode::summary_ci});
    r.prior_scale = j.at("prior_scale").get<double>();
    r.log_bf = j.at("log_bf").is_null() ? std::nan("") : j.at("log_bf").get<double>();
    const auto& s = j.at("stats");
    r.stats.df = s.at("df").get<double>();
    r.stats.sd_pooled = s.at("sd_pooled").get<double>();
    r.stats.n_eff = s.at("n_eff").get<double>();
    r.stats.t_obs = s.at("t_obs").get<double>();
    r.stats.mean_diff = s.at("mean_diff").get<double>();
    if (!j.at("ni_margin").is_null()) {
        r.ni_margin_std = j["ni_margin"].at("standardized").get<double>();
        r.ni_margin_unstd = j["ni_margin"].at("unstandardized").get<double>();
    }
    if (!j.at("interval").is_null()) {
        r.interval_std = j["interval"].at("standardized").get<std::array<double, 2>>();
        r.interval_unstd = j["interval"].at("unstandardized").get<std::array<double, 2>>();
    }
    return r;
}

inline std::string render_sweep_text(const SweepResult& sweep, const ReportOptions& opt = {}) {
    opt.validate();
    const std::string stars(30, '*');
    const std::string title = "Prior sensitivity analysis";
    std::string out = stars + "\n" + title + "\n" + std::string(title.size(), '-') + "\n";

    const BfResult* first = nullptr;
    for (const auto& e : sweep.entries)
        if (e.result) {
            first = &*e.result;
            break;
        }
    if (first) {
        out += detail::line("Data:", detail::data_label(first->input_mode));
        out += detail::line("Design:", detail::design_tag(first->design));
    }
    const std::string label = first ? detail::bf_label(first->orientation) : "BF";
    for (const auto& e : sweep.entries) {
        std::string v = e.result ? format_bf(e.result->log_bf, opt.significant_digits) : "error: " + e.error;
        out += "  r = " + detail::fixed(e.scale, 3) + "    " + label + " = " + v + "\n";
    }
    if (sweep.min_log_bf) {
        out += detail::line("Minimum " + label + ":", format_bf(*sweep.min_log_bf, opt.significant_digits));
        out += detail::line("Maximum " + label + ":", format_bf(*sweep.max_log_bf, opt.significant_digits));
    }
    out += stars + "\n";
    return out;
}

/// Entries in input order; failed scales carry "result": null and an error.
inline std::string render_sweep_json(const SweepResult& sweep) {
    nlohmann::json j;
    j["schema_version"] = kJsonSchemaVersion;
    j["kind"] = "sweep";
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : sweep.entries) {
        nlohmann::json je;
        je["scale"] = e.scale;
        if (e.result) {
            je["result"] = detail::result_body(*e.result);
        } else {
            je["result"] = nullptr;
            je["error"] = e.error;
        }
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    j["min_log_bf"] = sweep.min_log_bf ? detail::number_or_null(*sweep.min_log_bf) : nlohmann::json();
    j["max_log_bf"] = sweep.max_log_bf ? detail::number_or_null(*sweep.max_log_bf) : nlohmann::json();
    j["min_bf"] = sweep.min_log_bf ? detail::number_or_null(std::exp(*sweep.min_log_bf)) : nlohmann::json();
    j["max_bf"] = sweep.max_log_bf ? detail::number_or_null(std::exp(*sweep.max_log_bf)) : nlohmann::json();
    return j.dump(2) + "\n";
}

struct CurvePoint {
    double delta = 0.0;
    double prior = 0.0;
    double posterior = 0.0;
};

/// Prior and posterior densities of delta on an evenly spaced grid over a
/// finite range.
inline std::vector<CurvePoint> emit_density_curves(const DerivedStats& stats, const CauchyPrior& prior,
                                                   const Interval& range, int points) {
    if (points < 2) throw ValidationError("curve points must be at least 2");
    range.validate();
    if (!range.is_finite() || !(range.lower < range.upper))
        throw ValidationError("curve range must be a finite, non-empty interval");
    const Posterior post(stats, prior);
    std::vector<CurvePoint> rows;
    rows.reserve(static_cast<std::size_t>(points));
    const double step = (range.upper - range.lower) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double d = i == points - 1 ? range.upper : range.lower + i * step;
        rows.push_back({d, std::exp(prior.logpdf(d).value), std::exp(post.logpdf(d).value)});
    }
    return rows;
}

/// Range centred on the data that also shows the bulk of the prior.
inline Interval default_curve_range(const DerivedStats& stats, const CauchyPrior& prior) {
    const double d = stats.effect_size();
    const double w = 8.0 / std::sqrt(stats.n_eff);
    Interval iv{std::min(-5.0 * prior.scale, d - w), std::max(5.0 * prior.scale, d + w)};
    iv.lower = std::max(iv.lower, prior.truncation.lower);
    iv.upper = std::min(iv.upper, prior.truncation.upper);
    return iv;
}

inline void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& rows) {
    os << "delta,prior,posterior\n";
    for (const auto& r : rows)
        os << detail::printf_string("%.10g", r.delta) << ',' << detail::printf_string("%.10g", r.prior) << ','
           << detail::printf_string("%.10g", r.posterior) << '\n';
}

}  // namespace trialbf
