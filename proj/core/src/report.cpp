#include "tpan/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace tpan {

const char* cause_kind_name(CauseKind kind) {
    switch (kind) {
        case CauseKind::CreationOverhead: return "creation_overhead";
        case CauseKind::WorkStealingDominant: return "work_stealing";
        case CauseKind::Unattributed: return "unattributed";
    }
    return "?";
}

Report build_report(const Trace& trace, std::vector<WindowResult> windows,
                    std::vector<RelevanceFinding> findings, const TaskIndicatorTable* table,
                    ReportConfig config) {
    Report report;
    report.num_cpus = trace.num_cpus;
    report.trace_start = trace.trace_start;
    report.trace_end = trace.trace_end;
    report.task_count = trace.tasks.size();
    auto counters = trace.counters;
    std::sort(counters.begin(), counters.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& c : counters)
        report.counter_names.push_back(c.name);
    report.config = std::move(config);
    report.windows = std::move(windows);
    report.relevance = std::move(findings);
    if (table)
        report.exclusions = table->exclusion_counts;

    for (const auto& finding : report.relevance) {
        if (finding.relevant && finding.indicator.starts_with("delta:"))
            report.caveats.push_back(
                "indicator '" + finding.indicator +
                "' is a raw counter delta; longer tasks can accumulate larger deltas even "
                "without a performance anomaly, so inspect the per-tick rate as well");
    }
    return report;
}

namespace {

// Minimal JSON writer so key order and number formatting stay under our
// control (nlohmann would re-render doubles with shortest-round-trip digits).
class JsonWriter {
public:
    std::string str() const { return out_; }

    void begin_object() { separator(); out_ += '{'; fresh_ = true; }
    void end_object() { out_ += '}'; fresh_ = false; }
    void begin_array() { separator(); out_ += '['; fresh_ = true; }
    void end_array() { out_ += ']'; fresh_ = false; }

    void key(const char* name) {
        separator();
        string_literal(name);
        out_ += ':';
        fresh_ = true;
    }

    void value(const std::string& s) { separator(); string_literal(s); }
    void value(const char* s) { value(std::string(s)); }
    void value(std::int64_t v) { separator(); out_ += std::to_string(v); }
    void value(std::uint64_t v) { separator(); out_ += std::to_string(v); }
    void value(std::uint32_t v) { separator(); out_ += std::to_string(v); }
    void value(bool b) { separator(); out_ += b ? "true" : "false"; }
    void null() { separator(); out_ += "null"; }

    void real(double v) {
        separator();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        std::string s(buf);
        if (s.find_first_of(".eE") == std::string::npos && s != "inf" && s != "-inf" && s != "nan")
            s += ".0";
        out_ += s;
    }

private:
    void separator() {
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
            out_.back() != ':')
            out_ += ',';
        fresh_ = false;
    }

    void string_literal(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    bool fresh_ = true;
};

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string render_json(const Report& report) {
    JsonWriter w;
    w.begin_object();

    w.key("trace_meta");
    w.begin_object();
    w.key("schema_version");
    w.value(std::int64_t{1});
    w.key("num_cpus");
    w.value(report.num_cpus);
    w.key("start");
    w.value(report.trace_start);
    w.key("end");
    w.value(report.trace_end);
    w.key("task_count");
    w.value(report.task_count);
    w.key("counters");
    w.begin_array();
    for (const auto& name : report.counter_names)
        w.value(name);
    w.end_array();
    w.end_object();

    w.key("config");
    w.begin_object();
    w.key("t_exec");
    w.value(to_decimal_string(report.config.thresholds.t_exec));
    w.key("t_create");
    w.value(to_decimal_string(report.config.thresholds.t_create));
    w.key("t_steal");
    w.value(to_decimal_string(report.config.thresholds.t_steal));
    w.key("windows");
    w.value(static_cast<std::int64_t>(report.config.window_count));
    w.key("min_group_size");
    w.value(report.config.variation.min_group_size);
    w.key("min_cv");
    w.real(report.config.variation.min_cv);
    w.key("confidence_level");
    w.real(0.95);
    w.key("r2_threshold");
    w.real(report.config.relevance.r2_threshold);
    w.key("max_excluded");
    w.real(report.config.max_exclusion_fraction);
    w.key("groupings");
    w.begin_array();
    for (GroupingKind g : report.config.groupings)
        w.value(grouping_name(g));
    w.end_array();
    w.key("indicators");
    w.begin_array();
    for (const auto& spec : report.config.indicator_specs)
        w.value(spec);
    w.end_array();
    w.end_object();

    w.key("windows");
    w.begin_array();
    for (const auto& window : report.windows) {
        w.begin_object();
        w.key("start");
        w.value(window.window.start);
        w.key("end");
        w.value(window.window.end);
        w.key("sufficient");
        w.value(window.verdict.sufficient);
        w.key("total_exec");
        w.value(window.verdict.total_exec);
        w.key("bound");
        w.real(window.verdict.bound);
        w.key("exec_fraction");
        w.real(window.verdict.exec_fraction);
        w.key("causes");
        w.begin_array();
        for (const auto& cause : window.causes) {
            w.begin_object();
            w.key("kind");
            w.value(cause_kind_name(cause.kind));
            w.key("fraction");
            w.real(cause.fraction);
            w.key("threshold");
            w.real(cause.threshold);
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_array();

    w.key("relevance");
    w.begin_array();
    for (const auto& f : report.relevance) {
        w.begin_object();
        w.key("grouping");
        w.value(grouping_name(f.grouping));
        w.key("group");
        w.value(f.group.label());
        w.key("task_type");
        if (f.group.task_type)
            w.value(*f.group.task_type);
        else
            w.null();
        w.key("cpu");
        if (f.group.cpu)
            w.value(*f.group.cpu);
        else
            w.null();
        w.key("indicator");
        w.value(f.indicator);
        w.key("n");
        if (f.fit)
            w.value(f.fit->n_points);
        else
            w.null();
        w.key("alpha");
        if (f.fit)
            w.real(f.fit->alpha);
        else
            w.null();
        w.key("beta");
        if (f.fit)
            w.real(f.fit->beta);
        else
            w.null();
        w.key("r2");
        if (f.fit)
            w.real(f.fit->r2);
        else
            w.null();
        w.key("eligible");
        w.value(f.eligible);
        w.key("relevant");
        w.value(f.relevant);
        w.key("skipped");
        if (f.skipped)
            w.value(skip_reason_name(*f.skipped));
        else
            w.null();
        w.end_object();
    }
    w.end_array();

    w.key("exclusions");
    w.begin_object();
    for (ExclusionReason reason : {ExclusionReason::NoBracketingSamples,
                                   ExclusionReason::ZeroDenominator,
                                   ExclusionReason::SeriesMissing}) {
        auto it = report.exclusions.find(reason);
        w.key(exclusion_reason_name(reason));
        w.value(it == report.exclusions.end() ? std::size_t{0} : it->second);
    }
    w.end_object();

    w.key("caveats");
    w.begin_array();
    for (const auto& caveat : report.caveats)
        w.value(caveat);
    w.end_array();

    w.end_object();
    return w.str() + "\n";
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    out << "trace: " << report.num_cpus << " cpus, span [" << report.trace_start << ", "
        << report.trace_end << "), " << report.task_count << " tasks";
    if (!report.counter_names.empty()) {
        out << ", counters:";
        for (const auto& name : report.counter_names)
            out << " " << name;
    }
    out << "\n";

    if (!report.windows.empty()) {
        bool any_insufficient = false;
        for (const auto& window : report.windows) {
            if (window.verdict.sufficient)
                continue;
            any_insufficient = true;
            out << "window [" << window.window.start << ", " << window.window.end
                << "): insufficient parallelism (exec fraction "
                << format_real(window.verdict.exec_fraction) << ")";
            for (const auto& cause : window.causes) {
                switch (cause.kind) {
                    case CauseKind::CreationOverhead:
                        out << "; task creation " << format_real(cause.fraction) << " > "
                            << format_real(cause.threshold);
                        break;
                    case CauseKind::WorkStealingDominant:
                        out << "; work stealing " << format_real(cause.fraction) << " > "
                            << format_real(cause.threshold);
                        break;
                    case CauseKind::Unattributed:
                        out << "; cause unattributed";
                        break;
                }
            }
            out << "\n";
        }
        if (!any_insufficient)
            out << "no parallelism anomalies detected\n";
    }

    if (!report.relevance.empty()) {
        out << "relevance findings (" << report.relevance.size() << "):\n";
        out << "  grouping   group                indicator                        n      alpha"
               "       beta      r2     relevant\n";
        for (const auto& f : report.relevance) {
            char line[256];
            if (f.fit) {
                std::snprintf(line, sizeof line, "  %-10s %-20s %-32s %-6zu %-11s %-10s %-7s %s",
                              grouping_name(f.grouping), f.group.label().c_str(),
                              f.indicator.c_str(), f.fit->n_points,
                              format_real(f.fit->alpha).c_str(), format_real(f.fit->beta).c_str(),
                              format_real(f.fit->r2).c_str(), f.relevant ? "yes" : "no");
            } else {
                std::snprintf(line, sizeof line, "  %-10s %-20s %-32s skipped (%s)",
                              grouping_name(f.grouping), f.group.label().c_str(),
                              f.indicator.c_str(),
                              f.skipped ? skip_reason_name(*f.skipped) : "?");
            }
            out << line << "\n";
        }
    }

    std::size_t total_excluded = 0;
    for (const auto& [reason, count] : report.exclusions)
        total_excluded += count;
    if (total_excluded > 0) {
        out << "exclusions:";
        for (const auto& [reason, count] : report.exclusions)
            if (count > 0)
                out << " " << exclusion_reason_name(reason) << "=" << count;
        out << "\n";
    }
    for (const auto& caveat : report.caveats)
        out << "caveat: " << caveat << "\n";
    return out.str();
}

}  // namespace tpan
