#pragma once

// Command-line frontend: `super`, `infer`, `equiv` and `sweep` subcommands.
//
// Exit status: 0 success, 2 invalid invocation or input, 3 numerical failure.

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "trialbf/report.hpp"

namespace trialbf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Raised for malformed raw-data files.
class InputFileError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputFileError(path + ": cannot open file");
    return in;
}

inline void require_group_size(const std::string& path, const char* group, std::size_t n) {
    if (n < 2)
        throw InputFileError(path + ": group " + group + " has " + std::to_string(n) +
                             " observation(s); at least 2 are required");
}

}  // namespace detail

/// Reads a two-column CSV with header `group,value` and group labels x / y.
inline RawGroups read_raw_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    RawGroups g;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        const auto cols = detail::split(text, ',');
        const std::string where = path + ":" + std::to_string(lineno) + ": ";
        if (!header_seen) {
            if (cols.size() != 2 || detail::trim(cols[0]) != "group" || detail::trim(cols[1]) != "value")
                throw InputFileError(where + "header must be 'group,value', found '" + std::string(text) + "'");
            header_seen = true;
            continue;
        }
        if (cols.size() != 2)
            throw InputFileError(where + "expected 2 columns, found " + std::to_string(cols.size()));
        const auto label = detail::trim(cols[0]);
        const auto value = detail::parse_double(cols[1]);
        if (label != "x" && label != "y")
            throw InputFileError(where + "unknown group label '" + std::string(label) + "' (expected x or y)");
        if (!value)
            throw InputFileError(where + "value '" + std::string(detail::trim(cols[1])) + "' is not a finite number");
        (label == "x" ? g.x : g.y).push_back(*value);
    }
    if (!header_seen) throw InputFileError(path + ": file is empty (expected header 'group,value')");
    detail::require_group_size(path, "x", g.x.size());
    detail::require_group_size(path, "y", g.y.size());
    return g;
}

/// Reads one number per line; a non-numeric first line is taken as a header.
inline std::vector<double> read_single_column(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    std::size_t lineno = 0;
    std::vector<double> v;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        if (text.find(',') != std::string_view::npos)
            throw InputFileError(path + ":" + std::to_string(lineno) + ": expected a single column");
        const auto value = detail::parse_double(text);
        if (!value) {
            if (first) {
                first = false;
                continue;
            }
            throw InputFileError(path + ":" + std::to_string(lineno) + ": value '" + std::string(text) +
                                 "' is not a finite number");
        }
        first = false;
        v.push_back(*value);
    }
    return v;
}

namespace detail {

struct CliOptions {
    std::string raw;
    std::string raw_x;
    std::string raw_y;
    std::optional<int> n_x, n_y;
    std::optional<double> mean_x, mean_y, sd_x, sd_y, ci_margin, ci_level;

    std::string direction = "high";
    std::string alternative = "two_sided";
    std::optional<double> ni_margin;
    bool ni_margin_std = false;
    std::string interval = "0";
    bool interval_std = false;
    double prior_scale = kDefaultPriorScale;
    std::vector<double> scales;
    std::string design;  // sweep only

    std::string format = "text";
    std::string curves;
    int digits = 3;
};

inline void add_input_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--raw", o.raw, "CSV file with header group,value (groups x and y)")->group("Raw input");
    cmd->add_option("--raw-x", o.raw_x, "single-column file of control observations")->group("Raw input");
    cmd->add_option("--raw-y", o.raw_y, "single-column file of experimental observations")->group("Raw input");
    cmd->add_option("--n-x", o.n_x, "control group size")->group("Summary input");
    cmd->add_option("--n-y", o.n_y, "experimental group size")->group("Summary input");
    cmd->add_option("--mean-x", o.mean_x, "control group mean")->group("Summary input");
    cmd->add_option("--mean-y", o.mean_y, "experimental group mean")->group("Summary input");
    cmd->add_option("--sd-x", o.sd_x, "control group standard deviation")->group("Summary input");
    cmd->add_option("--sd-y", o.sd_y, "experimental group standard deviation")->group("Summary input");
    cmd->add_option("--ci-margin", o.ci_margin, "half-width of the CI for mean_y - mean_x")->group("Summary input");
    cmd->add_option("--ci-level", o.ci_level, "confidence level of that CI (default 0.95)")->group("Summary input");
}

inline void add_direction_flag(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--direction", o.direction, "which pole of the outcome is beneficial")
        ->check(CLI::IsMember({"high", "low"}));
}
inline void add_alternative_flag(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--alternative", o.alternative, "one_sided or two_sided (superiority only)")
        ->check(CLI::IsMember({"one_sided", "two_sided", "one-sided", "two-sided"}));
}
inline void add_margin_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--ni-margin", o.ni_margin, "non-inferiority margin (>= 0)");
    cmd->add_flag("--ni-margin-std", o.ni_margin_std, "margin is in standardized units");
}
inline void add_interval_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--interval", o.interval, "equivalence interval: v for (-v, v), or L,U (default 0 = point null)")
        ->allow_extra_args(false);
    cmd->add_flag("--interval-std", o.interval_std, "interval is in standardized units");
}
inline void add_output_flags(CLI::App* cmd, CliOptions& o, bool curves) {
    cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--digits", o.digits, "significant digits for scientific BF output")->check(CLI::Range(2, 10));
    if (curves) cmd->add_option("--curves", o.curves, "write prior/posterior density curves as CSV to this path");
}

inline StudyInput build_input(const CliOptions& o) {
    const bool raw_csv = !o.raw.empty();
    const bool raw_cols = !o.raw_x.empty() || !o.raw_y.empty();
    const bool any_summary = o.n_x || o.n_y || o.mean_x || o.mean_y || o.sd_x || o.sd_y || o.ci_margin || o.ci_level;
    if (raw_csv && raw_cols) throw ValidationError("conflicting input modes: use either --raw or --raw-x/--raw-y");
    if ((raw_csv || raw_cols) && any_summary)
        throw ValidationError("conflicting input modes: raw data files cannot be combined with summary statistics");
    if (raw_csv) return read_raw_csv(o.raw);
    if (raw_cols) {
        if (o.raw_x.empty() || o.raw_y.empty()) throw ValidationError("--raw-x and --raw-y must be given together");
        RawGroups g{read_single_column(o.raw_x), read_single_column(o.raw_y)};
        require_group_size(o.raw_x, "x", g.x.size());
        require_group_size(o.raw_y, "y", g.y.size());
        return g;
    }
    if (!any_summary) throw ValidationError("no input given: use --raw, --raw-x/--raw-y, or summary statistics");

    const bool moments = o.sd_x || o.sd_y;
    const bool ci = o.ci_margin || o.ci_level;
    if (moments && ci) throw ValidationError("conflicting input modes: give either --sd-x/--sd-y or --ci-margin");
    std::vector<std::string> missing;
    if (!o.n_x) missing.push_back("--n-x");
    if (!o.n_y) missing.push_back("--n-y");
    if (!o.mean_x) missing.push_back("--mean-x");
    if (!o.mean_y) missing.push_back("--mean-y");
    if (ci) {
        if (!o.ci_margin) missing.push_back("--ci-margin");
    } else {
        if (!o.sd_x) missing.push_back("--sd-x");
        if (!o.sd_y) missing.push_back("--sd-y");
    }
    if (!missing.empty()) {
        std::string msg = "incomplete summary input, missing:";
        for (const auto& m : missing) msg += " " + m;
        throw ValidationError(msg);
    }
    if (ci) return SummaryCi{*o.n_x, *o.n_y, *o.mean_x, *o.mean_y, *o.ci_margin, o.ci_level.value_or(0.95)};
    return SummaryMoments{*o.n_x, *o.n_y, *o.mean_x, *o.mean_y, *o.sd_x, *o.sd_y};
}

inline EquivalenceInterval parse_interval(const std::string& text, bool standardized) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) {
        const auto v = parse_double(parts[0]);
        if (!v) throw ValidationError("--interval: '" + text + "' is not a number");
        return EquivalenceInterval::symmetric(*v, standardized);
    }
    if (parts.size() == 2) {
        const auto lo = parse_double(parts[0]);
        const auto hi = parse_double(parts[1]);
        if (!lo || !hi) throw ValidationError("--interval: expected two numbers L,U, got '" + text + "'");
        return {*lo, *hi, standardized};
    }
    throw ValidationError("--interval takes one value or two comma-separated values");
}

inline TestSpec build_spec(Design design, const CliOptions& o) {
    const Direction dir = o.direction == "low" ? Direction::low : Direction::high;
    switch (design) {
        case Design::superiority: {
            const bool one = o.alternative == "one_sided" || o.alternative == "one-sided";
            return TestSpec::superiority(one ? Alternative::one_sided : Alternative::two_sided, dir);
        }
        case Design::non_inferiority:
            if (!o.ni_margin) throw ValidationError("infer requires --ni-margin");
            return TestSpec::non_inferiority({*o.ni_margin, o.ni_margin_std}, dir);
        case Design::equivalence:
        default:
            return TestSpec::equivalence(parse_interval(o.interval, o.interval_std), dir);
    }
}

inline void write_curves(const std::string& path, const BfResult& result, const TestSpec& spec, int points) {
    const CauchyPrior prior = spec.design == Design::superiority ? superiority_prior(spec, result.prior_scale)
                                                                 : CauchyPrior{result.prior_scale, Interval::whole_line()};
    const auto rows = emit_density_curves(result.stats, prior, default_curve_range(result.stats, prior), points);
    std::ofstream f(path);
    if (!f) throw ValidationError(path + ": cannot open curve output file");
    write_curves_csv(f, rows);
    if (!f) throw ValidationError(path + ": failed writing curve output");
}

}  // namespace detail

/// Runs one invocation; argv[0] is the program name.
inline int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayes factors for superiority, non-inferiority and equivalence designs", "trialbf"};
    app.require_subcommand(1);
    detail::CliOptions o;

    auto* super = app.add_subcommand("super", "superiority test (BF10)");
    auto* infer = app.add_subcommand("infer", "non-inferiority test (BF10)");
    auto* equiv = app.add_subcommand("equiv", "equivalence test (BF01)");
    auto* sweep = app.add_subcommand("sweep", "Bayes factors over a list of prior scales");

    for (auto* cmd : {super, infer, equiv, sweep}) {
        detail::add_input_flags(cmd, o);
        detail::add_direction_flag(cmd, o);
        detail::add_output_flags(cmd, o, cmd != sweep);
        if (cmd != sweep) cmd->add_option("--prior-scale", o.prior_scale, "Cauchy prior scale r (default 1/sqrt(2))");
    }
    detail::add_alternative_flag(super, o);
    detail::add_margin_flags(infer, o);
    detail::add_interval_flags(equiv, o);

    sweep->add_option("--design", o.design, "super, infer or equiv")
        ->required()
        ->check(CLI::IsMember({"super", "infer", "equiv"}));
    sweep->add_option("--scales", o.scales, "comma-separated prior scales")->required()->delimiter(',');
    detail::add_alternative_flag(sweep, o);
    detail::add_margin_flags(sweep, o);
    detail::add_interval_flags(sweep, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        ReportOptions ropt;
        ropt.format = o.format == "json" ? OutputFormat::json : OutputFormat::text;
        ropt.significant_digits = o.digits;
        ropt.validate();

        if (sweep->parsed()) {
            const Design design = o.design == "super"   ? Design::superiority
                                  : o.design == "infer" ? Design::non_inferiority
                                                        : Design::equivalence;
            if (design != Design::superiority && sweep->count("--alternative"))
                throw ValidationError("--alternative applies to --design super only");
            if (design != Design::non_inferiority && (sweep->count("--ni-margin") || o.ni_margin_std))
                throw ValidationError("--ni-margin applies to --design infer only");
            if (design != Design::equivalence && (sweep->count("--interval") || o.interval_std))
                throw ValidationError("--interval applies to --design equiv only");
            const StudyInput input = detail::build_input(o);
            const TestSpec spec = detail::build_spec(design, o);
            const SweepResult res = prior_sweep(input, spec, o.scales);
            out << (ropt.format == OutputFormat::json ? render_sweep_json(res) : render_sweep_text(res, ropt));
            bool any_numerical = false;
            for (const auto& e : res.entries)
                if (!e.result) {
                    err << "trialbf: prior scale " << e.scale << ": " << e.error << "\n";
                    any_numerical = true;
                }
            return any_numerical ? kExitNumerical : kExitOk;
        }

        const Design design = super->parsed()   ? Design::superiority
                              : infer->parsed() ? Design::non_inferiority
                                                : Design::equivalence;
        const StudyInput input = detail::build_input(o);
        const TestSpec spec = detail::build_spec(design, o);
        const BfResult result = run_test(input, spec, o.prior_scale);
        out << (ropt.format == OutputFormat::json ? render_json(result) : render_text(result, ropt));
        if (!o.curves.empty()) detail::write_curves(o.curves, result, spec, ropt.curve_points);
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "trialbf: error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "trialbf: error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalError& e) {
        err << "trialbf: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace trialbf
