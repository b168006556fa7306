#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tpan/trace_model.hpp"

namespace tpan {

// A per-task scalar derived from counters: a raw delta, a ratio of two
// deltas (e.g. cache miss rate), or a delta per tick.
struct IndicatorDef {
    enum class Kind { RawDelta, Ratio, TimeRate };

    std::string name;
    Kind kind = Kind::RawDelta;
    CounterId counter = -1;      // RawDelta/TimeRate counter, Ratio numerator
    CounterId denominator = -1;  // Ratio only
};

// Spec grammar: "delta:<counter>", "ratio:<num>/<den>", "rate:<counter>".
// Counter names are resolved against the trace; throws std::invalid_argument.
IndicatorDef parse_indicator_spec(const Trace& trace, const std::string& spec);

// Default indicator set: one RawDelta per counter, plus a Ratio for every
// (X_misses, X_accesses) name pair sharing prefix X.
std::vector<IndicatorDef> default_indicators(const Trace& trace);

enum class ExclusionReason { NoBracketingSamples, ZeroDenominator, SeriesMissing };

const char* exclusion_reason_name(ExclusionReason reason);

using CellValue = std::variant<double, ExclusionReason>;

inline bool is_excluded(const CellValue& cell) { return cell.index() == 1; }

// v(c, i, t): exact at samples, linear interpolation strictly between
// consecutive samples, nullopt outside the sampled range.
std::optional<double> counter_value(const CounterSeries& series, Timestamp t);

// Counter change over the task's span: v at task end minus v at task start
// on the executing CPU's series.
CellValue task_delta(const Trace& trace, const TaskInstance& task, CounterId counter);

CellValue indicator_value(const Trace& trace, const TaskInstance& task, const IndicatorDef& def);

struct TaskIndicatorRow {
    TaskId id = 0;
    std::string task_type;
    CpuId cpu = 0;
    std::int64_t duration = 0;
    std::vector<CellValue> cells;  // parallel to TaskIndicatorTable::defs
};

struct TaskIndicatorTable {
    std::vector<IndicatorDef> defs;
    std::vector<TaskIndicatorRow> rows;  // ordered by (start, id)
    std::map<ExclusionReason, std::size_t> exclusion_counts;
};

TaskIndicatorTable build_table(const Trace& trace, std::vector<IndicatorDef> defs);

}  // namespace tpan
