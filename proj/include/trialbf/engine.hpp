#pragma once

// Bayes factors for superiority, non-inferiority and equivalence designs.
//
// The data enter only through the observed two-sample t statistic, whose
// likelihood given the standardized effect delta is noncentral t with
// df = n_x + n_y - 2 and ncp = delta * sqrt(n_eff). The prior on delta is a
// location-zero Cauchy, optionally truncated.
//
// Direction "low" is reduced to "high" by negating t (delta' = -delta); all
// margins and intervals are read in that benefit-oriented frame.
//
// - superiority: BF10 = m1 / m0 with m0 the central t density at t_obs and m1
//   the marginal under the (half-)Cauchy prior.
// - non-inferiority: BF10 is the posterior odds of delta' > -nim over
//   delta' < -nim divided by the prior odds, both from the full Cauchy.
// - equivalence: BF01, interval (lo, hi) inside vs outside in the same
//   region-odds form; the point null (0, 0) uses the Savage-Dickey ratio.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trialbf/datamodel.hpp"
#include "trialbf/errors.hpp"
#include "trialbf/logmath.hpp"
#include "trialbf/quadrature.hpp"
#include "trialbf/specfun.hpp"

namespace trialbf {

inline constexpr double kDefaultPriorScale = 0.70710678118654752440;  // 1/sqrt(2)

/// Smallest prior mass accepted on either side of a region split.
inline constexpr double kMinRegionMass = 1e-15;

struct CauchyPrior {
    double scale = kDefaultPriorScale;
    Interval truncation = Interval::whole_line();

    void validate() const {
        if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("prior scale must be positive");
        truncation.validate();
        if (!(mass() > 0.0)) throw ValidationError("prior truncation interval has zero mass");
    }

    /// Untruncated Cauchy mass of the truncation interval.
    double mass() const { return cauchy_interval_mass(truncation.lower, truncation.upper, scale); }

    /// Renormalized density; -inf outside the truncation interval.
    LogDensity logpdf(double delta) const {
        if (!truncation.contains(delta)) return {kNegInf};
        return {cauchy_logpdf(delta, scale).value - std::log(mass())};
    }
};

enum class Design { superiority, non_inferiority, equivalence };
enum class Direction { high, low };
enum class Alternative { one_sided, two_sided };
enum class Orientation { bf10, bf01 };

inline std::string_view to_string(Design d) noexcept {
    switch (d) {
        case Design::superiority:
            return "superiority";
        case Design::non_inferiority:
            return "non_inferiority";
        case Design::equivalence:
        default:
            return "equivalence";
    }
}
inline std::string_view to_string(Direction d) noexcept { return d == Direction::high ? "high" : "low"; }
inline std::string_view to_string(Alternative a) noexcept {
    return a == Alternative::one_sided ? "one_sided" : "two_sided";
}
inline std::string_view to_string(Orientation o) noexcept { return o == Orientation::bf10 ? "bf10" : "bf01"; }

struct Margin {
    double value = 0.0;
    bool standardized = false;
};

struct EquivalenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool standardized = false;

    /// A single value v means (-|v|, |v|).
    static EquivalenceInterval symmetric(double v, bool standardized) {
        return {-std::abs(v), std::abs(v), standardized};
    }
    bool is_point_null() const noexcept { return lower == 0.0 && upper == 0.0; }
};

struct TestSpec {
    Design design = Design::superiority;
    Direction direction = Direction::high;
    Alternative alternative = Alternative::two_sided;   // superiority only
    std::optional<Margin> ni_margin;                     // non-inferiority only
    std::optional<EquivalenceInterval> interval;         // equivalence only

    static TestSpec superiority(Alternative alt = Alternative::two_sided, Direction dir = Direction::high) {
        return {Design::superiority, dir, alt, std::nullopt, std::nullopt};
    }
    static TestSpec non_inferiority(Margin nim, Direction dir = Direction::high) {
        return {Design::non_inferiority, dir, Alternative::two_sided, nim, std::nullopt};
    }
    static TestSpec equivalence(EquivalenceInterval iv = {}, Direction dir = Direction::high) {
        return {Design::equivalence, dir, Alternative::two_sided, std::nullopt, iv};
    }

    void validate() const {
        switch (design) {
            case Design::superiority:
                if (ni_margin || interval) throw ValidationError("superiority takes neither a margin nor an interval");
                break;
            case Design::non_inferiority:
                if (!ni_margin) throw ValidationError("non-inferiority requires a margin");
                if (interval) throw ValidationError("non-inferiority does not take an equivalence interval");
                if (alternative != Alternative::two_sided)
                    throw ValidationError("the alternative setting applies to superiority only");
                if (!std::isfinite(ni_margin->value) || ni_margin->value < 0.0)
                    throw ValidationError("non-inferiority margin must be finite and >= 0");
                break;
            case Design::equivalence:
                if (!interval) throw ValidationError("equivalence requires an interval");
                if (ni_margin) throw ValidationError("equivalence does not take a non-inferiority margin");
                if (alternative != Alternative::two_sided)
                    throw ValidationError("the alternative setting applies to superiority only");
                if (std::isnan(interval->lower) || std::isnan(interval->upper))
                    throw ValidationError("equivalence interval bounds must be numbers");
                if (interval->lower > interval->upper)
                    throw ValidationError("equivalence interval requires lower <= upper");
                break;
        }
    }
};

struct BfResult {
    double log_bf = 0.0;
    Orientation orientation = Orientation::bf10;
    Design design = Design::superiority;
    Direction direction = Direction::high;
    Alternative alternative = Alternative::two_sided;
    double prior_scale = kDefaultPriorScale;
    InputMode input_mode = InputMode::summary_moments;
    DerivedStats stats;  // as observed, oriented y - x

    std::optional<double> ni_margin_std;
    std::optional<double> ni_margin_unstd;
    std::optional<std::array<double, 2>> interval_std;    // benefit-oriented frame
    std::optional<std::array<double, 2>> interval_unstd;

    /// Same evidence expressed in the opposite orientation.
    BfResult flipped() const {
        BfResult r = *this;
        r.log_bf = -log_bf;
        r.orientation = orientation == Orientation::bf10 ? Orientation::bf01 : Orientation::bf10;
        return r;
    }
};

/// The Bayes factor in the result's own orientation.
inline double get_bf(const BfResult& result) noexcept { return std::exp(result.log_bf); }

namespace detail {

inline DerivedStats canonical(DerivedStats s, Direction dir) {
    if (dir == Direction::low) {
        s.t_obs = -s.t_obs;
        s.mean_diff = -s.mean_diff;
    }
    return s;
}

// ln[ noncentral t likelihood of t_obs at delta ] + ln prior(delta).
inline double log_joint(double delta, const DerivedStats& s, const CauchyPrior& prior) {
    const double lp = prior.logpdf(delta).value;
    if (lp == kNegInf) return kNegInf;
    return noncentral_t_logpdf(s.t_obs, s.df, delta * std::sqrt(s.n_eff)).value + lp;
}

inline QuadratureSettings engine_quadrature() { return QuadratureSettings{1e-8, 1e-12, 2000}; }

}  // namespace detail

/// ln of the integral of likelihood x prior over `region` (intersected with
/// the prior's truncation interval).
inline double log_region_marginal(const DerivedStats& stats, const CauchyPrior& prior, Interval region) {
    region.lower = std::max(region.lower, prior.truncation.lower);
    region.upper = std::min(region.upper, prior.truncation.upper);
    region.validate();
    return integrate_log([&](double d) { return detail::log_joint(d, stats, prior); }, region,
                         detail::engine_quadrature());
}

/// ln of the marginal likelihood of t_obs under the prior.
inline double log_marginal_likelihood(const DerivedStats& stats, const CauchyPrior& prior) {
    return log_region_marginal(stats, prior, prior.truncation);
}

/// Posterior of delta with its normalizing constant cached.
class Posterior {
public:
    Posterior(const DerivedStats& stats, const CauchyPrior& prior)
        : stats_(stats), prior_(prior) {
        stats_.validate();
        prior_.validate();
        log_norm_ = log_marginal_likelihood(stats_, prior_);
    }

    LogDensity logpdf(double delta) const { return {detail::log_joint(delta, stats_, prior_) - log_norm_}; }
    double log_normalizer() const noexcept { return log_norm_; }

    /// ln P(region | data).
    double log_mass(const Interval& region) const { return log_region_marginal(stats_, prior_, region) - log_norm_; }

    const DerivedStats& stats() const noexcept { return stats_; }
    const CauchyPrior& prior() const noexcept { return prior_; }

private:
    DerivedStats stats_;
    CauchyPrior prior_;
    double log_norm_ = 0.0;
};

/// ln p(delta | data) under the given prior.
inline LogDensity posterior_log_density(double delta, const DerivedStats& stats, const CauchyPrior& prior) {
    return Posterior(stats, prior).logpdf(delta);
}

/// ln BF01 for the point null delta = delta0 as posterior over prior density.
inline double savage_dickey_log_bf01(const DerivedStats& stats, const CauchyPrior& prior, double delta0) {
    prior.validate();
    if (!prior.truncation.contains(delta0) || !std::isfinite(delta0))
        throw ValidationError("Savage-Dickey point lies outside the prior support");
    const Posterior post(stats, prior);
    return post.logpdf(delta0).value - prior.logpdf(delta0).value;
}

inline double savage_dickey_bf(const DerivedStats& stats, const CauchyPrior& prior, double delta0) {
    return std::exp(savage_dickey_log_bf01(stats, prior, delta0));
}

/// ln of [P(inside | D) / P(inside)] / [P(outside | D) / P(outside)] for the
/// full Cauchy prior, where `inside` is (lower, upper) and either end may be
/// infinite.
inline double region_odds_log_bf(const DerivedStats& stats, double scale, double lower, double upper) {
    const CauchyPrior prior{scale, Interval::whole_line()};
    prior.validate();
    stats.validate();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double p_in = cauchy_interval_mass(lower, upper, scale);
    const double p_out = (std::isfinite(lower) ? cauchy_interval_mass(kNegInf, lower, scale) : 0.0) +
                         (std::isfinite(upper) ? cauchy_interval_mass(upper, kInf, scale) : 0.0);
    if (!(p_in >= kMinRegionMass) || !(p_out >= kMinRegionMass))
        throw ValidationError("a hypothesis region has (numerically) zero prior mass");

    const double log_in = log_region_marginal(stats, prior, {lower, upper});
    std::vector<double> outside;
    if (std::isfinite(lower)) outside.push_back(log_region_marginal(stats, prior, {kNegInf, lower}));
    if (std::isfinite(upper)) outside.push_back(log_region_marginal(stats, prior, {upper, kInf}));
    const double log_out = log_sum_exp(outside);
    const double log_p_in = std::log(p_in);
    const double log_p_out = std::log(p_out);
    return (log_in - log_p_in) - (log_out - log_p_out);
}

namespace detail {

inline BfResult base_result(const DerivedStats& stats, const StudyInput& input, const TestSpec& spec, double r) {
    BfResult res;
    res.design = spec.design;
    res.direction = spec.direction;
    res.alternative = spec.alternative;
    res.prior_scale = r;
    res.input_mode = input_mode(input);
    res.stats = stats;
    return res;
}

inline void require_design(const TestSpec& spec, Design d) {
    spec.validate();
    if (spec.design != d) throw ValidationError(std::string("test specification is not ") + std::string(to_string(d)));
}

inline void require_scale(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("prior scale must be positive");
}

}  // namespace detail

/// Prior on delta under H1 of a superiority test, in the observed (y - x) frame.
inline CauchyPrior superiority_prior(const TestSpec& spec, double r) {
    CauchyPrior p{r, Interval::whole_line()};
    if (spec.alternative == Alternative::one_sided) {
        if (spec.direction == Direction::high)
            p.truncation = {0.0, std::numeric_limits<double>::infinity()};
        else
            p.truncation = {kNegInf, 0.0};
    }
    return p;
}

inline BfResult super_bf(const DerivedStats& observed, const StudyInput& input, const TestSpec& spec,
                         double r = kDefaultPriorScale) {
    detail::require_design(spec, Design::superiority);
    detail::require_scale(r);
    observed.validate();
    const DerivedStats s = detail::canonical(observed, spec.direction);
    CauchyPrior prior{r, Interval::whole_line()};
    if (spec.alternative == Alternative::one_sided) prior.truncation = {0.0, std::numeric_limits<double>::infinity()};

    BfResult res = detail::base_result(observed, input, spec, r);
    res.orientation = Orientation::bf10;
    res.log_bf = log_marginal_likelihood(s, prior) - central_t_logpdf(s.t_obs, s.df).value;
    return res;
}

inline BfResult super_bf(const StudyInput& input, const TestSpec& spec, double r = kDefaultPriorScale) {
    return super_bf(derive_stats(input), input, spec, r);
}

inline BfResult infer_bf(const DerivedStats& observed, const StudyInput& input, const TestSpec& spec,
                         double r = kDefaultPriorScale) {
    detail::require_design(spec, Design::non_inferiority);
    detail::require_scale(r);
    observed.validate();
    const DerivedStats s = detail::canonical(observed, spec.direction);
    const double nim_std = standardize_margin(spec.ni_margin->value, spec.ni_margin->standardized, observed);
    const double boundary = -nim_std;

    BfResult res = detail::base_result(observed, input, spec, r);
    res.orientation = Orientation::bf10;
    res.ni_margin_std = nim_std;
    res.ni_margin_unstd = nim_std * observed.sd_pooled;
    if (!spec.ni_margin->standardized) res.ni_margin_unstd = spec.ni_margin->value;
    // H1 is delta' > boundary.
    res.log_bf = region_odds_log_bf(s, r, boundary, std::numeric_limits<double>::infinity());
    return res;
}

inline BfResult infer_bf(const StudyInput& input, const TestSpec& spec, double r = kDefaultPriorScale) {
    return infer_bf(derive_stats(input), input, spec, r);
}

inline BfResult equiv_bf(const DerivedStats& observed, const StudyInput& input, const TestSpec& spec,
                         double r = kDefaultPriorScale) {
    detail::require_design(spec, Design::equivalence);
    detail::require_scale(r);
    observed.validate();
    const DerivedStats s = detail::canonical(observed, spec.direction);
    const EquivalenceInterval& iv = *spec.interval;
    const double lo = standardize_margin(iv.lower, iv.standardized, observed);
    const double hi = standardize_margin(iv.upper, iv.standardized, observed);

    BfResult res = detail::base_result(observed, input, spec, r);
    res.orientation = Orientation::bf01;
    res.interval_std = std::array<double, 2>{lo, hi};
    res.interval_unstd = iv.standardized ? std::array<double, 2>{lo * observed.sd_pooled, hi * observed.sd_pooled}
                                         : std::array<double, 2>{iv.lower, iv.upper};
    if (iv.is_point_null()) {
        res.log_bf = savage_dickey_log_bf01(s, CauchyPrior{r, Interval::whole_line()}, 0.0);
    } else {
        if (!(lo < hi)) throw ValidationError("equivalence interval has zero width but is not the point null (0, 0)");
        res.log_bf = region_odds_log_bf(s, r, lo, hi);
    }
    return res;
}

inline BfResult equiv_bf(const StudyInput& input, const TestSpec& spec, double r = kDefaultPriorScale) {
    return equiv_bf(derive_stats(input), input, spec, r);
}

/// Dispatches on spec.design.
inline BfResult run_test(const DerivedStats& stats, const StudyInput& input, const TestSpec& spec,
                         double r = kDefaultPriorScale) {
    spec.validate();
    switch (spec.design) {
        case Design::superiority:
            return super_bf(stats, input, spec, r);
        case Design::non_inferiority:
            return infer_bf(stats, input, spec, r);
        case Design::equivalence:
        default:
            return equiv_bf(stats, input, spec, r);
    }
}

inline BfResult run_test(const StudyInput& input, const TestSpec& spec, double r = kDefaultPriorScale) {
    return run_test(derive_stats(input), input, spec, r);
}

struct SweepEntry {
    double scale = 0.0;
    std::optional<BfResult> result;
    std::string error;  // set when result is empty
};

struct SweepResult {
    std::vector<SweepEntry> entries;  // in input order
    std::optional<double> min_log_bf;
    std::optional<double> max_log_bf;
};

/// One test per prior scale. Failures are recorded per entry and do not stop
/// the sweep.
inline SweepResult prior_sweep(const StudyInput& input, const TestSpec& spec, const std::vector<double>& scales) {
    if (scales.empty()) throw ValidationError("sweep needs at least one prior scale");
    for (double r : scales) detail::require_scale(r);
    spec.validate();
    const DerivedStats stats = derive_stats(input);

    SweepResult out;
    for (double r : scales) {
        SweepEntry e;
        e.scale = r;
        try {
            e.result = run_test(stats, input, spec, r);
            const double v = e.result->log_bf;
            out.min_log_bf = out.min_log_bf ? std::min(*out.min_log_bf, v) : v;
            out.max_log_bf = out.max_log_bf ? std::max(*out.max_log_bf, v) : v;
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

}  // namespace trialbf
