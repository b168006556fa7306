#include "tpan/trace_io.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tpan {

using nlohmann::json;

const char* parse_error_code_name(ParseError::Code code) {
    switch (code) {
        case ParseError::Code::Syntax: return "SYNTAX";
        case ParseError::Code::MissingHeader: return "MISSING_HEADER";
        case ParseError::Code::UnknownVersion: return "UNKNOWN_VERSION";
        case ParseError::Code::Validation: return "VALIDATION";
    }
    return "?";
}

namespace {

[[noreturn]] void syntax_error(std::size_t line, const std::string& what) {
    throw ParseError(ParseError::Code::Syntax, line,
                     "line " + std::to_string(line) + ": " + what);
}

std::int64_t require_int(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end())
        syntax_error(line, std::string("missing field '") + key + "'");
    if (it->is_number_unsigned()) {
        auto v = it->get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(INT64_MAX))
            syntax_error(line, std::string("field '") + key + "' exceeds 64-bit range");
        return static_cast<std::int64_t>(v);
    }
    if (it->is_number_integer()) {
        auto v = it->get<std::int64_t>();
        if (v < 0)
            syntax_error(line, std::string("field '") + key + "' must be non-negative");
        return v;
    }
    syntax_error(line, std::string("field '") + key + "' must be a non-negative integer");
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end())
        syntax_error(line, std::string("missing field '") + key + "'");
    if (!it->is_string())
        syntax_error(line, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

void note_unknown_fields(const json& obj, std::initializer_list<const char*> known,
                         std::size_t line, std::vector<std::string>& warnings) {
    for (const auto& [key, value] : obj.items()) {
        bool found = false;
        for (const char* k : known)
            if (key == k)
                found = true;
        if (!found)
            warnings.push_back("line " + std::to_string(line) + ": ignoring unknown field '" + key + "'");
    }
}

}  // namespace

LenientParseResult parse_trace_lenient(std::istream& input, const ParseOptions& options) {
    LenientParseResult result;
    std::vector<CounterSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;

    while (std::getline(input, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            syntax_error(line_no, "malformed JSON record");
        auto type_it = obj.find("type");
        if (type_it == obj.end() || !type_it->is_string())
            syntax_error(line_no, "record has no string 'type' field");
        std::string type = type_it->get<std::string>();

        if (!have_header) {
            if (type != "header")
                throw ParseError(ParseError::Code::MissingHeader, line_no,
                                 "first record must be the header");
            auto version = require_int(obj, "version", line_no);
            if (version != 1)
                throw ParseError(ParseError::Code::UnknownVersion, line_no,
                                 "unsupported trace version " + std::to_string(version));
            result.trace.num_cpus = static_cast<std::uint32_t>(require_int(obj, "num_cpus", line_no));
            result.trace.trace_start = require_int(obj, "start", line_no);
            result.trace.trace_end = require_int(obj, "end", line_no);
            note_unknown_fields(obj, {"type", "version", "num_cpus", "start", "end"}, line_no,
                                result.warnings);
            have_header = true;
            continue;
        }

        if (type == "header") {
            syntax_error(line_no, "duplicate header record");
        } else if (type == "counter_def") {
            CounterDescriptor c;
            c.id = require_int(obj, "id", line_no);
            c.name = require_string(obj, "name", line_no);
            note_unknown_fields(obj, {"type", "id", "name"}, line_no, result.warnings);
            result.trace.counters.push_back(std::move(c));
        } else if (type == "state") {
            StateInterval s;
            s.cpu = static_cast<CpuId>(require_int(obj, "cpu", line_no));
            s.kind = state_from_name(require_string(obj, "state", line_no));
            s.start = require_int(obj, "start", line_no);
            s.end = require_int(obj, "end", line_no);
            note_unknown_fields(obj, {"type", "cpu", "state", "start", "end"}, line_no,
                                result.warnings);
            result.trace.state_intervals.push_back(std::move(s));
        } else if (type == "task") {
            TaskInstance t;
            t.id = require_int(obj, "id", line_no);
            t.task_type = require_string(obj, "task_type", line_no);
            t.cpu = static_cast<CpuId>(require_int(obj, "cpu", line_no));
            t.start = require_int(obj, "start", line_no);
            t.end = require_int(obj, "end", line_no);
            note_unknown_fields(obj, {"type", "id", "task_type", "cpu", "start", "end"}, line_no,
                                result.warnings);
            result.trace.tasks.push_back(std::move(t));
        } else if (type == "sample") {
            CounterSample s;
            s.counter = require_int(obj, "counter", line_no);
            s.cpu = static_cast<CpuId>(require_int(obj, "cpu", line_no));
            s.t = require_int(obj, "t", line_no);
            s.value = require_int(obj, "value", line_no);
            note_unknown_fields(obj, {"type", "counter", "cpu", "t", "value"}, line_no,
                                result.warnings);
            samples.push_back(s);
        } else {
            result.warnings.push_back("line " + std::to_string(line_no) +
                                      ": skipping unknown record type '" + type + "'");
        }
    }

    if (!have_header)
        throw ParseError(ParseError::Code::MissingHeader, line_no, "input has no header record");

    result.trace.series = build_series(std::move(samples));
    result.report = validate(result.trace);

    if (options.drop_bad_series && result.report.has_errors()) {
        std::set<SeriesKey> bad;
        for (const auto& [key, series] : result.trace.series) {
            for (std::size_t i = 1; i < series.samples.size(); ++i) {
                if (!(series.samples[i].first > series.samples[i - 1].first) ||
                    series.samples[i].second < series.samples[i - 1].second)
                    bad.insert(key);
            }
        }
        for (const auto& key : bad) {
            result.warnings.push_back("dropping non-monotone series for counter " +
                                      std::to_string(key.first) + " on cpu " +
                                      std::to_string(key.second));
            result.trace.series.erase(key);
        }
        if (!bad.empty())
            result.report = validate(result.trace);
    }
    return result;
}

ParseResult parse_trace(std::istream& input, const ParseOptions& options) {
    LenientParseResult lenient = parse_trace_lenient(input, options);
    if (lenient.report.has_errors()) {
        std::string msg = "trace violates model invariants:";
        for (const auto& v : lenient.report.violations)
            if (v.severity == Severity::Error)
                msg += "\n  [" + v.code + "] " + v.message;
        throw ParseError(ParseError::Code::Validation, msg, lenient.report);
    }
    return ParseResult{std::move(lenient.trace), std::move(lenient.warnings)};
}

std::string serialize_trace(const Trace& trace) {
    std::string out;
    auto emit = [&out](const nlohmann::ordered_json& obj) {
        out += obj.dump();
        out += '\n';
    };

    emit({{"type", "header"},
          {"version", 1},
          {"num_cpus", trace.num_cpus},
          {"start", trace.trace_start},
          {"end", trace.trace_end}});

    auto counters = trace.counters;
    std::sort(counters.begin(), counters.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& c : counters)
        emit({{"type", "counter_def"}, {"id", c.id}, {"name", c.name}});

    auto states = trace.state_intervals;
    std::stable_sort(states.begin(), states.end(), [](const auto& a, const auto& b) {
        return std::tie(a.cpu, a.start, a.end, a.kind) < std::tie(b.cpu, b.start, b.end, b.kind);
    });
    for (const auto& s : states)
        emit({{"type", "state"},
              {"cpu", s.cpu},
              {"state", state_name(s.kind)},
              {"start", s.start},
              {"end", s.end}});

    auto tasks = trace.tasks;
    std::sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& t : tasks)
        emit({{"type", "task"},
              {"id", t.id},
              {"task_type", t.task_type},
              {"cpu", t.cpu},
              {"start", t.start},
              {"end", t.end}});

    // series map is already ordered by (counter, cpu); samples by t
    for (const auto& [key, series] : trace.series)
        for (const auto& [t, v] : series.samples)
            emit({{"type", "sample"},
                  {"counter", series.counter},
                  {"cpu", series.cpu},
                  {"t", t},
                  {"value", v}});

    return out;
}

}  // namespace tpan
