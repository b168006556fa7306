#include "tpan/counter_attr.hpp"

#include <algorithm>
#include <stdexcept>

namespace tpan {

namespace {

CounterId resolve_counter(const Trace& trace, const std::string& name, const std::string& spec) {
    const CounterDescriptor* desc = trace.find_counter_by_name(name);
    if (!desc)
        throw std::invalid_argument("indicator spec '" + spec + "': unknown counter '" + name + "'");
    return desc->id;
}

}  // namespace

IndicatorDef parse_indicator_spec(const Trace& trace, const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("indicator spec '" + spec +
                                    "' must be delta:<c>, ratio:<a>/<b> or rate:<c>");
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    IndicatorDef def;
    def.name = spec;
    if (kind == "delta") {
        def.kind = IndicatorDef::Kind::RawDelta;
        def.counter = resolve_counter(trace, rest, spec);
    } else if (kind == "rate") {
        def.kind = IndicatorDef::Kind::TimeRate;
        def.counter = resolve_counter(trace, rest, spec);
    } else if (kind == "ratio") {
        auto slash = rest.find('/');
        if (slash == std::string::npos)
            throw std::invalid_argument("indicator spec '" + spec + "': ratio needs <num>/<den>");
        def.kind = IndicatorDef::Kind::Ratio;
        def.counter = resolve_counter(trace, rest.substr(0, slash), spec);
        def.denominator = resolve_counter(trace, rest.substr(slash + 1), spec);
    } else {
        throw std::invalid_argument("indicator spec '" + spec + "': unknown kind '" + kind + "'");
    }
    return def;
}

std::vector<IndicatorDef> default_indicators(const Trace& trace) {
    std::vector<IndicatorDef> defs;
    auto counters = trace.counters;
    std::sort(counters.begin(), counters.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& c : counters) {
        IndicatorDef def;
        def.name = "delta:" + c.name;
        def.kind = IndicatorDef::Kind::RawDelta;
        def.counter = c.id;
        defs.push_back(std::move(def));
    }
    const std::string misses = "_misses";
    for (const auto& c : counters) {
        if (c.name.size() <= misses.size() || !c.name.ends_with(misses))
            continue;
        std::string prefix = c.name.substr(0, c.name.size() - misses.size());
        const CounterDescriptor* den = trace.find_counter_by_name(prefix + "_accesses");
        if (!den)
            continue;
        IndicatorDef def;
        def.name = "ratio:" + c.name + "/" + den->name;
        def.kind = IndicatorDef::Kind::Ratio;
        def.counter = c.id;
        def.denominator = den->id;
        defs.push_back(std::move(def));
    }
    return defs;
}

const char* exclusion_reason_name(ExclusionReason reason) {
    switch (reason) {
        case ExclusionReason::NoBracketingSamples: return "no_bracketing_samples";
        case ExclusionReason::ZeroDenominator: return "zero_denominator";
        case ExclusionReason::SeriesMissing: return "series_missing";
    }
    return "?";
}

std::optional<double> counter_value(const CounterSeries& series, Timestamp t) {
    const auto& samples = series.samples;
    if (samples.empty() || t < samples.front().first || t > samples.back().first)
        return std::nullopt;
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const auto& sample, Timestamp x) { return sample.first < x; });
    // it points at the first sample with time >= t
    if (it->first == t)
        return static_cast<double>(it->second);
    const auto& [t2, v2] = *it;
    const auto& [t1, v1] = *(it - 1);
    return static_cast<double>(v1) + static_cast<double>(v2 - v1) *
                                         (static_cast<double>(t - t1) /
                                          static_cast<double>(t2 - t1));
}

CellValue task_delta(const Trace& trace, const TaskInstance& task, CounterId counter) {
    const CounterSeries* series = trace.find_series(counter, task.cpu);
    if (!series || series->samples.empty())
        return ExclusionReason::SeriesMissing;
    std::optional<double> at_start = counter_value(*series, task.start);
    std::optional<double> at_end = counter_value(*series, task.end);
    if (!at_start || !at_end)
        return ExclusionReason::NoBracketingSamples;
    return *at_end - *at_start;
}

CellValue indicator_value(const Trace& trace, const TaskInstance& task, const IndicatorDef& def) {
    CellValue num = task_delta(trace, task, def.counter);
    if (is_excluded(num))
        return num;
    switch (def.kind) {
        case IndicatorDef::Kind::RawDelta:
            return num;
        case IndicatorDef::Kind::TimeRate:
            return std::get<double>(num) / static_cast<double>(task.duration());
        case IndicatorDef::Kind::Ratio: {
            CellValue den = task_delta(trace, task, def.denominator);
            if (is_excluded(den))
                return den;
            if (std::get<double>(den) == 0.0)
                return ExclusionReason::ZeroDenominator;
            return std::get<double>(num) / std::get<double>(den);
        }
    }
    return ExclusionReason::SeriesMissing;
}

TaskIndicatorTable build_table(const Trace& trace, std::vector<IndicatorDef> defs) {
    TaskIndicatorTable table;
    table.defs = std::move(defs);

    auto tasks = trace.tasks;
    std::sort(tasks.begin(), tasks.end(), [](const TaskInstance& a, const TaskInstance& b) {
        return std::tie(a.start, a.id) < std::tie(b.start, b.id);
    });

    for (const auto& task : tasks) {
        TaskIndicatorRow row;
        row.id = task.id;
        row.task_type = task.task_type;
        row.cpu = task.cpu;
        row.duration = task.duration();
        for (const auto& def : table.defs) {
            CellValue cell = indicator_value(trace, task, def);
            if (is_excluded(cell))
                ++table.exclusion_counts[std::get<ExclusionReason>(cell)];
            row.cells.push_back(std::move(cell));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace tpan
