#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpan/counter_attr.hpp"
#include "tpan/rational.hpp"
#include "tpan/regression.hpp"
#include "tpan/report.hpp"
#include "tpan/state_analysis.hpp"
#include "tpan/synth_gen.hpp"
#include "tpan/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitValidation = 3;

struct CommonFlags {
    std::string input;
    std::string output;
    std::string format = "text";
};

struct StateFlags {
    std::string t_exec = "0.95";
    std::string t_create = "0.05";
    std::string t_steal = "0.10";
    int windows = 1;
};

struct CorrelateFlags {
    std::vector<std::string> indicators;
    std::vector<std::string> groupings;
    std::string r2_threshold = "0.80";
    std::size_t min_group = 10;
    std::string min_cv = "0.10";
    std::string max_excluded = "0.5";
    bool drop_bad_series = false;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

tpan::Rational parse_fraction_flag(const std::string& name, const std::string& text,
                                   bool allow_zero, bool allow_one) {
    tpan::Rational r;
    try {
        r = tpan::parse_decimal(text);
    } catch (const std::exception& e) {
        throw UsageError(name + ": " + e.what());
    }
    bool ok = (allow_zero ? r.num >= 0 : r.num > 0) &&
              (allow_one ? r.num <= r.den : r.num < r.den);
    if (!ok)
        throw UsageError(name + ": value " + text + " out of range");
    return r;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw tpan::ParseError(tpan::ParseError::Code::Syntax, 0, "cannot open '" + path + "'");
    return in;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    out << content;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << "\n";
}

tpan::ThresholdConfig make_thresholds(const StateFlags& flags) {
    tpan::ThresholdConfig config;
    config.t_exec = parse_fraction_flag("--t-exec", flags.t_exec, false, true);
    config.t_create = parse_fraction_flag("--t-create", flags.t_create, true, false);
    config.t_steal = parse_fraction_flag("--t-steal", flags.t_steal, true, false);
    return config;
}

std::vector<tpan::GroupingKind> make_groupings(const CorrelateFlags& flags) {
    std::vector<tpan::GroupingKind> groupings;
    if (flags.groupings.empty()) {
        groupings = {tpan::GroupingKind::ByType, tpan::GroupingKind::ByTypeAndCpu};
    } else {
        for (const auto& name : flags.groupings) {
            auto kind = tpan::grouping_from_name(name);
            if (!kind)
                throw UsageError("--grouping: unknown grouping '" + name + "'");
            groupings.push_back(*kind);
        }
    }
    return groupings;
}

int run_validate(const CommonFlags& common) {
    auto in = open_input(common.input);
    tpan::LenientParseResult result = tpan::parse_trace_lenient(in);
    print_warnings(result.warnings);
    std::ostringstream out;
    if (common.format == "json") {
        out << "[";
        bool first = true;
        for (const auto& v : result.report.violations) {
            if (!first)
                out << ",";
            first = false;
            out << "{\"severity\":\"" << (v.severity == tpan::Severity::Error ? "error" : "warning")
                << "\",\"code\":\"" << v.code << "\",\"record\":" << v.record_index << "}";
        }
        out << "]\n";
    } else {
        for (const auto& v : result.report.violations)
            out << (v.severity == tpan::Severity::Error ? "error" : "warning") << " [" << v.code
                << "] " << v.message << " (record " << v.record_index << ")\n";
        out << (result.report.has_errors() ? "trace is invalid" : "trace is valid") << " ("
            << result.report.error_count() << " errors, "
            << result.report.violations.size() - result.report.error_count() << " warnings)\n";
    }
    write_output(common.output, out.str());
    return result.report.has_errors() ? kExitValidation : kExitOk;
}

int run_analysis(const CommonFlags& common, const StateFlags& states,
                 const CorrelateFlags& correlate, bool with_states, bool with_relevance) {
    tpan::ReportConfig config;
    config.thresholds = make_thresholds(states);
    if (states.windows < 1)
        throw UsageError("--windows must be at least 1");
    config.window_count = states.windows;
    if (correlate.min_group < 3)
        throw UsageError("--min-group must be at least 3");
    config.variation.min_group_size = correlate.min_group;
    config.variation.min_cv =
        parse_fraction_flag("--min-cv", correlate.min_cv, false, true).to_double();
    config.relevance.r2_threshold =
        parse_fraction_flag("--r2-threshold", correlate.r2_threshold, false, true).to_double();
    config.max_exclusion_fraction =
        parse_fraction_flag("--max-excluded", correlate.max_excluded, true, true).to_double();
    config.groupings = make_groupings(correlate);

    auto in = open_input(common.input);
    tpan::ParseOptions options;
    options.drop_bad_series = correlate.drop_bad_series;
    tpan::ParseResult parsed = tpan::parse_trace(in, options);
    print_warnings(parsed.warnings);

    std::vector<tpan::WindowResult> windows;
    if (with_states)
        windows = tpan::windowed_analysis(parsed.trace, config.window_count, config.thresholds);

    std::vector<tpan::RelevanceFinding> findings;
    tpan::TaskIndicatorTable table;
    bool have_table = false;
    if (with_relevance) {
        std::vector<tpan::IndicatorDef> defs;
        if (correlate.indicators.empty()) {
            defs = tpan::default_indicators(parsed.trace);
        } else {
            for (const auto& spec : correlate.indicators) {
                try {
                    defs.push_back(tpan::parse_indicator_spec(parsed.trace, spec));
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            }
        }
        for (const auto& def : defs)
            config.indicator_specs.push_back(def.name);
        if (!defs.empty()) {
            table = tpan::build_table(parsed.trace, std::move(defs));
            findings = tpan::analyze(table, config.groupings, config.variation, config.relevance,
                                     config.max_exclusion_fraction);
            have_table = true;
        }
    }

    tpan::Report report = tpan::build_report(parsed.trace, std::move(windows), std::move(findings),
                                             have_table ? &table : nullptr, std::move(config));
    write_output(common.output,
                 common.format == "json" ? tpan::render_json(report) : tpan::render_text(report));
    return kExitOk;
}

int run_synth(const std::string& spec_path, std::uint64_t seed, const CommonFlags& common) {
    if (common.output.empty())
        throw UsageError("synth requires --output (the truth ledger is written next to it)");
    std::ifstream in(spec_path, std::ios::binary);
    if (!in)
        throw tpan::ParseError(tpan::ParseError::Code::Syntax, 0,
                               "cannot open spec '" + spec_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    tpan::SynthSpec spec = tpan::parse_synth_spec(buffer.str());
    tpan::SynthResult result = tpan::generate(spec, seed);
    write_output(common.output, tpan::serialize_trace(result.trace));
    write_output(common.output + ".truth.json", tpan::truth_to_json(result));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offline analyzer for task-parallel execution traces"};
    app.require_subcommand(1);

    CommonFlags common;
    StateFlags states;
    CorrelateFlags correlate;
    std::string spec_path;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd, bool input_required) {
        auto* opt = cmd->add_option("--input", common.input, "trace file to analyze");
        if (input_required)
            opt->required();
        cmd->add_option("--output", common.output, "output path (default: stdout)");
        cmd->add_option("--format", common.format, "output format")
            ->check(CLI::IsMember({"text", "json"}));
    };
    auto add_states = [&](CLI::App* cmd) {
        cmd->add_option("--t-exec", states.t_exec, "execution-time threshold t_e");
        cmd->add_option("--t-create", states.t_create, "task-creation threshold t_c");
        cmd->add_option("--t-steal", states.t_steal, "work-stealing threshold t_s");
        cmd->add_option("--windows", states.windows, "number of analysis windows");
    };
    auto add_correlate = [&](CLI::App* cmd) {
        cmd->add_option("--indicator", correlate.indicators,
                        "indicator spec: delta:<c>, ratio:<a>/<b>, rate:<c> (repeatable)");
        cmd->add_option("--grouping", correlate.groupings,
                        "task grouping: all, type, cpu, type-cpu (repeatable)");
        cmd->add_option("--r2-threshold", correlate.r2_threshold, "relevance threshold on r2");
        cmd->add_option("--min-group", correlate.min_group, "minimum group size");
        cmd->add_option("--min-cv", correlate.min_cv, "minimum coefficient of variation");
        cmd->add_option("--max-excluded", correlate.max_excluded,
                        "maximum excluded fraction per group");
        cmd->add_flag("--drop-bad-series", correlate.drop_bad_series,
                      "drop non-monotone counter series instead of failing");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a trace against model invariants");
    add_common(validate_cmd, true);

    auto* states_cmd = app.add_subcommand("states", "windowed parallelism threshold analysis");
    add_common(states_cmd, true);
    add_states(states_cmd);

    auto* correlate_cmd =
        app.add_subcommand("correlate", "per-task counter attribution and duration regression");
    add_common(correlate_cmd, true);
    add_correlate(correlate_cmd);

    auto* report_cmd = app.add_subcommand("report", "full analysis pipeline");
    add_common(report_cmd, true);
    add_states(report_cmd);
    add_correlate(report_cmd);

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic trace from a spec");
    synth_cmd->add_option("--spec", spec_path, "synth spec JSON")->required();
    synth_cmd->add_option("--seed", seed, "PRNG seed");
    add_common(synth_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (validate_cmd->parsed())
            return run_validate(common);
        if (states_cmd->parsed())
            return run_analysis(common, states, correlate, true, false);
        if (correlate_cmd->parsed())
            return run_analysis(common, states, correlate, false, true);
        if (report_cmd->parsed())
            return run_analysis(common, states, correlate, true, true);
        if (synth_cmd->parsed())
            return run_synth(spec_path, seed, common);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tpan::ParseError& e) {
        std::cerr << "error [" << tpan::parse_error_code_name(e.code()) << "]: " << e.what()
                  << "\n";
        return e.code() == tpan::ParseError::Code::Validation ? kExitValidation : kExitFormat;
    } catch (const tpan::SynthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    }
    return kExitUsage;
}
