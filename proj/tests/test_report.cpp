#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trialbf/report.hpp"

using namespace trialbf;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

BfResult sleep_result() {
    return infer_bf(SummaryCi{193, 205, 4.7, 4.8, 0.19, 0.95},
                    TestSpec::non_inferiority({1.0, false}, Direction::low));
}

}  // namespace

TEST_CASE("sleep-study block follows the golden layout", "[report]") {
    const auto golden = lines_of(read_file(TRIALBF_GOLDEN_DIR "/sleep_study_noninferiority.txt"));
    const auto block = lines_of(render_text(sleep_result()));
    REQUIRE(block.size() == golden.size());
    for (std::size_t i = 0; i < golden.size(); ++i) {
        if (golden[i].rfind("    BF10", 0) == 0) continue;  // value line compared separately
        INFO("line " << i);
        CHECK(block[i] == golden[i]);
    }
    CHECK_THAT(render_text(sleep_result()), ContainsSubstring("1.04 (standardised)"));
    CHECK_THAT(render_text(sleep_result()), ContainsSubstring("1.00 (unstandardised)"));
}

TEST_CASE("BF line shape", "[report]") {
    const auto block = lines_of(render_text(sleep_result()));
    const std::string& bf = block[block.size() - 2];
    CHECK(bf.rfind("    BF10 (non-inferiority) = ", 0) == 0);
    const std::string value = bf.substr(std::string("    BF10 (non-inferiority) = ").size());
    CHECK(value.size() == 8);  // d.dde+XX
    CHECK(value[1] == '.');
    CHECK(value[4] == 'e');
}

TEST_CASE("BF value formatting", "[report]") {
    CHECK(format_bf(0.0) == "1.00");
    CHECK(format_bf(std::log(51.578381715844586)) == "51.58");
    CHECK(format_bf(std::log(4.41e9)) == "4.41e+09");
    CHECK(format_bf(std::log(4.41e9), 5) == "4.4100e+09");
    CHECK(format_bf(std::log(9999.0)) == "9999.00");
    CHECK(format_bf(std::log(10000.0)) == "1.00e+04");
    CHECK(format_bf(std::log(2.5e-7)) == "2.50e-07");
    CHECK(format_bf(std::log(0.0123)) == "0.01");
    // beyond double range the value is built from the logarithm
    CHECK(format_bf(1000.0 * std::numbers::ln10) == "1.00e+1000");
    CHECK(format_bf(-(1000.0 + std::log10(4.0)) * std::numbers::ln10) == "2.50e-1001");
}

TEST_CASE("superiority block", "[report]") {
    BfResult r = super_bf(SummaryMoments{10, 10, 0.0, 0.0, 1.0, 1.0}, TestSpec::superiority());
    r.log_bf = 0.0;
    const std::string text = render_text(r);
    CHECK_THAT(text, ContainsSubstring("Superiority analysis\n--------------------\n"));
    CHECK_THAT(text, ContainsSubstring("H0 (non-superiority):         mu_y == mu_x\n"));
    CHECK_THAT(text, ContainsSubstring("H1 (superiority):             mu_y != mu_x\n"));
    CHECK_THAT(text, ContainsSubstring("    BF10 (superiority) = 1.00\n"));

    const BfResult low = super_bf(SummaryMoments{10, 10, 0.0, 0.0, 1.0, 1.0},
                                  TestSpec::superiority(Alternative::one_sided, Direction::low));
    CHECK_THAT(render_text(low), ContainsSubstring("H1 (superiority):             mu_y < mu_x\n"));
}

TEST_CASE("equivalence blocks", "[report]") {
    const StudyInput in = SummaryMoments{10, 10, 0.0, 0.1, 1.0, 1.0};
    const std::string point = render_text(equiv_bf(in, TestSpec::equivalence()));
    CHECK_THAT(point, ContainsSubstring("H0 (equivalence):             mu_y == mu_x\n"));
    CHECK_THAT(point, ContainsSubstring("H1 (non-equivalence):         mu_y != mu_x\n"));
    CHECK_THAT(point, ContainsSubstring("    BF01 (equivalence) = "));
    CHECK_THAT(point, ContainsSubstring("Lower = 0.00; Upper = 0.00 (standardised)"));

    const std::string iv = render_text(equiv_bf(in, TestSpec::equivalence(EquivalenceInterval::symmetric(0.3, true))));
    CHECK_THAT(iv, ContainsSubstring("H0 (equivalence):             -0.30 < delta < 0.30\n"));
    CHECK_THAT(iv, ContainsSubstring("H1 (non-equivalence):         delta < -0.30 OR delta > 0.30\n"));
}

TEST_CASE("raw data label", "[report]") {
    const BfResult r = super_bf(RawGroups{{1.0, 2.0, 3.0}, {2.0, 3.5, 4.0}}, TestSpec::superiority());
    CHECK_THAT(render_text(r), ContainsSubstring("Data:                         raw data\n"));
}

TEST_CASE("text rendering is deterministic", "[report]") {
    CHECK(render_text(sleep_result()) == render_text(sleep_result()));
    CHECK(render_json(sleep_result()) == render_json(sleep_result()));
}

TEST_CASE("report options validation", "[report]") {
    ReportOptions o;
    o.significant_digits = 1;
    CHECK_THROWS_AS(render_text(sleep_result(), o), ValidationError);
    o.significant_digits = 11;
    CHECK_THROWS_AS(o.validate(), ValidationError);
    o.significant_digits = 3;
    o.curve_points = 1;
    CHECK_THROWS_AS(o.validate(), ValidationError);
}

TEST_CASE("JSON round trip", "[report]") {
    for (const BfResult& r :
         {sleep_result(), super_bf(SummaryMoments{30, 31, 0.0, 0.37, 1.2, 0.9}, TestSpec::superiority()),
          equiv_bf(RawGroups{{1.0, 2.0, 3.5}, {2.0, 3.5, 4.0}}, TestSpec::equivalence({-0.4, 0.2, false}))}) {
        const BfResult back = parse_result_json(render_json(r));
        CHECK(back.log_bf == r.log_bf);
        CHECK(back.prior_scale == r.prior_scale);
        CHECK(back.design == r.design);
        CHECK(back.direction == r.direction);
        CHECK(back.alternative == r.alternative);
        CHECK(back.orientation == r.orientation);
        CHECK(back.input_mode == r.input_mode);
        CHECK(back.stats.t_obs == r.stats.t_obs);
        CHECK(back.stats.df == r.stats.df);
        CHECK(back.stats.n_eff == r.stats.n_eff);
        CHECK(back.stats.sd_pooled == r.stats.sd_pooled);
        CHECK(back.stats.mean_diff == r.stats.mean_diff);
        CHECK(back.ni_margin_std == r.ni_margin_std);
        CHECK(back.ni_margin_unstd == r.ni_margin_unstd);
        CHECK(back.interval_std == r.interval_std);
        CHECK(back.interval_unstd == r.interval_unstd);
    }
}

TEST_CASE("JSON fields", "[report]") {
    const BfResult r = sleep_result();
    const auto j = nlohmann::json::parse(render_json(r));
    CHECK(j["schema_version"] == 1);
    CHECK(j["result"]["design"] == "non_inferiority");
    CHECK(j["result"]["orientation"] == "bf10");
    CHECK(j["result"]["input_mode"] == "summary-ci");
    CHECK(j["result"]["ci_df_convention"] == "pooled");
    CHECK(j["result"]["log_bf"].get<double>() == r.log_bf);
    CHECK_THAT(j["result"]["bf"].get<double>(), WithinRel(get_bf(r), 1e-15));

    BfResult huge = r;
    huge.log_bf = 5000.0;
    const auto h = nlohmann::json::parse(render_json(huge));
    CHECK(h["result"]["bf"].is_null());
    CHECK(h["result"]["log_bf"].get<double>() == 5000.0);
}

TEST_CASE("sweep output keeps input order", "[report]") {
    const StudyInput in = SummaryMoments{100, 100, 0.0, 0.5, 1.0, 1.0};
    const std::vector<double> scales = {5.0, 0.5, 1.0};
    const SweepResult s = prior_sweep(in, TestSpec::superiority(), scales);
    const auto j = nlohmann::json::parse(render_sweep_json(s));
    REQUIRE(j["entries"].size() == 3);
    for (std::size_t i = 0; i < scales.size(); ++i) CHECK(j["entries"][i]["scale"].get<double>() == scales[i]);
    CHECK_THAT(j["max_bf"].get<double>(), WithinRel(51.6, 0.005));
    CHECK_THAT(j["min_bf"].get<double>(), WithinRel(9.9, 0.01));

    const std::string text = render_sweep_text(s);
    CHECK_THAT(text, ContainsSubstring("Minimum BF10:                 9.87\n"));
    CHECK_THAT(text, ContainsSubstring("Maximum BF10:                 51.58\n"));
    CHECK(text.find("r = 5.000") < text.find("r = 0.500"));
}

TEST_CASE("density curves", "[report]") {
    const DerivedStats s = derive_stats(SummaryMoments{20, 20, 0.0, 0.4, 1.0, 1.0});
    const CauchyPrior prior{1.0, Interval::whole_line()};

    const auto rows = emit_density_curves(s, prior, {-10.0, 10.0}, 20001);
    REQUIRE(rows.size() == 20001);
    CHECK(rows.front().delta == -10.0);
    CHECK(rows.back().delta == 10.0);
    const auto& mid = rows[10000];
    CHECK(mid.delta == 0.0);
    CHECK_THAT(mid.prior, WithinRel(1.0 / std::numbers::pi, 1e-14));

    double area = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].prior >= 0.0);
        CHECK(rows[i].posterior >= 0.0);
        area += 0.5 * (rows[i].posterior + rows[i - 1].posterior) * (rows[i].delta - rows[i - 1].delta);
    }
    CHECK_THAT(area, WithinAbs(1.0, 1e-3));
    CHECK_THAT(mid.posterior / mid.prior, WithinRel(savage_dickey_bf(s, prior, 0.0), 1e-4));

    CHECK_THROWS_AS(emit_density_curves(s, prior, {-1.0, 1.0}, 1), ValidationError);
    CHECK_THROWS_AS(emit_density_curves(s, prior, Interval::whole_line(), 10), ValidationError);
}

TEST_CASE("curve CSV format", "[report]") {
    std::ostringstream os;
    write_curves_csv(os, {{0.0, 0.5, 0.25}, {1.0, 0.125, 1.5}});
    CHECK(os.str() == "delta,prior,posterior\n0,0.5,0.25\n1,0.125,1.5\n");
}
