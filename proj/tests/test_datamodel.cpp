#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "trialbf/datamodel.hpp"

using namespace trialbf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("pooled standard deviation", "[datamodel]") {
    CHECK_THAT(pooled_sd({12, 12, 0.0, 1.0, 2.5, 2.5}), WithinRel(2.5, 1e-15));
    CHECK(pooled_sd({100, 100, 0.0, 0.5, 1.0, 1.0}) == 1.0);
    CHECK_THAT(pooled_sd({3, 2, 0.0, 0.0, 2.0, 1.0}), WithinRel(std::sqrt(3.0), 1e-15));
}

TEST_CASE("summary moments validation", "[datamodel]") {
    CHECK_THROWS_AS(pooled_sd({1, 5, 0.0, 0.0, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(pooled_sd({5, 5, 0.0, 0.0, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(pooled_sd({5, 5, 0.0, 0.0, -1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(pooled_sd({5, 5, std::nan(""), 0.0, 1.0, 1.0}), ValidationError);
}

TEST_CASE("SD implied by a confidence interval", "[datamodel]") {
    const SummaryCi sleep{193, 205, 4.7, 4.8, 0.19, 0.95};
    // 0.19 / t_{0.975, 396} / sqrt(1/193 + 1/205), mpmath
    CHECK_THAT(sd_from_ci(sleep), WithinRel(0.96358534740845484, 1e-12));
    CHECK_THAT(1.0 / sd_from_ci(sleep), WithinAbs(1.04, 0.005));

    SummaryCi doubled = sleep;
    doubled.ci_margin *= 2.0;
    CHECK_THAT(sd_from_ci(doubled), WithinRel(2.0 * sd_from_ci(sleep), 1e-14));
}

TEST_CASE("CI margin round trip", "[datamodel]") {
    const double sd = 0.2;
    const int n = 51;
    const double se = sd * std::sqrt(2.0 / n);
    const double margin = student_t_quantile(0.975, 2.0 * n - 2.0) * se;
    CHECK_THAT(sd_from_ci({n, n, 0.0, 0.1, margin, 0.95}), WithinRel(sd, 1e-10));
    const double margin90 = student_t_quantile(0.95, 2.0 * n - 2.0) * se;
    CHECK_THAT(sd_from_ci({n, n, 0.0, 0.1, margin90, 0.90}), WithinRel(sd, 1e-10));
}

TEST_CASE("summary CI validation", "[datamodel]") {
    CHECK_THROWS_AS(sd_from_ci({2, 2, 0.0, 0.1, 0.3, 0.95}), ValidationError);
    CHECK_NOTHROW(sd_from_ci({2, 3, 0.0, 0.1, 0.3, 0.95}));
    CHECK_THROWS_AS(sd_from_ci({10, 10, 0.0, 0.1, 0.0, 0.95}), ValidationError);
    CHECK_THROWS_AS(sd_from_ci({10, 10, 0.0, 0.1, 0.3, 1.0}), ValidationError);
    CHECK_THROWS_AS(sd_from_ci({10, 10, 0.0, 0.1, 0.3, 0.0}), ValidationError);
}

TEST_CASE("derived statistics from moments", "[datamodel]") {
    const DerivedStats s = derive_stats(SummaryMoments{100, 100, 0.0, 0.5, 1.0, 1.0});
    CHECK(s.df == 198.0);
    CHECK(s.n_eff == 50.0);
    CHECK(s.sd_pooled == 1.0);
    CHECK_THAT(s.t_obs, WithinRel(0.5 / std::sqrt(2.0 / 100.0), 1e-15));
    CHECK_THAT(s.t_obs, WithinAbs(3.5355339, 1e-7));
    CHECK_THAT(s.effect_size(), WithinRel(0.5, 1e-15));
    CHECK(s.n_eff <= 100.0);
}

TEST_CASE("derived statistics from a CI", "[datamodel]") {
    const DerivedStats s = derive_stats(SummaryCi{193, 205, 4.7, 4.8, 0.19, 0.95});
    CHECK(s.df == 396.0);
    CHECK_THAT(s.t_obs, WithinRel(1.03472242551028997, 1e-10));
    CHECK_THAT(s.t_obs, WithinAbs(1.035, 1e-3));
}

TEST_CASE("raw data reduce to their moments", "[datamodel]") {
    // x: mean 2, sd 1; y: mean 2.5, sd 1
    const RawGroups raw{{1.0, 2.0, 3.0}, {1.5, 2.5, 3.5}};
    const SummaryMoments m = to_moments(raw);
    CHECK(m.n_x == 3);
    CHECK(m.n_y == 3);
    CHECK(m.mean_x == 2.0);
    CHECK(m.mean_y == 2.5);
    CHECK(m.sd_x == 1.0);
    CHECK(m.sd_y == 1.0);

    const DerivedStats a = derive_stats(raw);
    const DerivedStats b = derive_stats(SummaryMoments{3, 3, 2.0, 2.5, 1.0, 1.0});
    CHECK_THAT(a.t_obs, WithinRel(b.t_obs, 1e-12));
    CHECK_THAT(a.sd_pooled, WithinRel(b.sd_pooled, 1e-12));
    CHECK(a.df == b.df);
    CHECK(a.n_eff == b.n_eff);
}

TEST_CASE("raw data validation", "[datamodel]") {
    CHECK_THROWS_AS(to_moments({{1.0}, {1.0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(to_moments({{1.0, 1.0}, {1.0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(to_moments({{1.0, HUGE_VAL}, {1.0, 2.0}}), ValidationError);
}

TEST_CASE("two-pass moments are stable under a large offset", "[datamodel]") {
    const RawGroups raw{{1e9 + 1.0, 1e9 + 2.0, 1e9 + 3.0}, {1e9 + 1.5, 1e9 + 2.5, 1e9 + 3.5}};
    const SummaryMoments m = to_moments(raw);
    CHECK_THAT(m.sd_x, WithinRel(1.0, 1e-12));
    CHECK_THAT(m.mean_y - m.mean_x, WithinRel(0.5, 1e-12));
}

TEST_CASE("margin standardization", "[datamodel]") {
    const DerivedStats sleep = derive_stats(SummaryCi{193, 205, 4.7, 4.8, 0.19, 0.95});
    CHECK_THAT(standardize_margin(1.0, false, sleep), WithinRel(1.0377907911213902, 1e-12));
    CHECK(std::round(standardize_margin(1.0, false, sleep) * 100.0) / 100.0 == 1.04);
    CHECK(standardize_margin(0.3, true, sleep) == 0.3);
    CHECK(standardize_margin(0.0, false, sleep) == 0.0);
    CHECK(standardize_margin(0.0, true, sleep) == 0.0);
}

TEST_CASE("input mode tags", "[datamodel]") {
    CHECK(to_string(input_mode(StudyInput{RawGroups{}})) == "raw");
    CHECK(to_string(input_mode(StudyInput{SummaryMoments{}})) == "summary-moments");
    CHECK(to_string(input_mode(StudyInput{SummaryCi{}})) == "summary-ci");
}
