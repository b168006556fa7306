#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tpan {

// Tick timestamps; the unit is opaque to all analyses (nanoseconds by
// convention). All duration arithmetic stays in exact 64-bit integers.
using Timestamp = std::int64_t;
using CpuId = std::uint32_t;
using TaskId = std::int64_t;
using CounterId = std::int64_t;

// Run-time state a processor is in during an interval. The three named
// states drive the threshold analysis; anything else is carried as Other.
struct StateKind {
    enum class Tag { TaskExecution, TaskCreation, WorkStealing, Other };

    Tag tag = Tag::Other;
    std::string other_name;  // set iff tag == Other

    static StateKind task_execution() { return {Tag::TaskExecution, {}}; }
    static StateKind task_creation() { return {Tag::TaskCreation, {}}; }
    static StateKind work_stealing() { return {Tag::WorkStealing, {}}; }
    static StateKind other(std::string name) { return {Tag::Other, std::move(name)}; }

    friend bool operator==(const StateKind&, const StateKind&) = default;
    friend auto operator<=>(const StateKind&, const StateKind&) = default;
};

// Wire name of a state kind ("task_execution", ...; Other carries its own name).
std::string state_name(const StateKind& kind);
StateKind state_from_name(const std::string& name);

struct StateInterval {
    CpuId cpu = 0;
    StateKind kind;
    Timestamp start = 0;
    Timestamp end = 0;  // half-open [start, end)

    friend bool operator==(const StateInterval&, const StateInterval&) = default;
};

struct TaskInstance {
    TaskId id = 0;
    std::string task_type;
    CpuId cpu = 0;
    Timestamp start = 0;
    Timestamp end = 0;

    Timestamp duration() const { return end - start; }

    friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

struct CounterDescriptor {
    CounterId id = 0;
    std::string name;

    friend bool operator==(const CounterDescriptor&, const CounterDescriptor&) = default;
};

struct CounterSample {
    CounterId counter = 0;
    CpuId cpu = 0;
    Timestamp t = 0;
    std::int64_t value = 0;  // absolute cumulative count
};

// Time-sorted absolute samples for one (counter, cpu) pair.
struct CounterSeries {
    CounterId counter = 0;
    CpuId cpu = 0;
    std::vector<std::pair<Timestamp, std::int64_t>> samples;

    friend bool operator==(const CounterSeries&, const CounterSeries&) = default;
};

using SeriesKey = std::pair<CounterId, CpuId>;

struct Trace {
    std::uint32_t num_cpus = 0;
    Timestamp trace_start = 0;
    Timestamp trace_end = 0;
    std::vector<StateInterval> state_intervals;
    std::vector<TaskInstance> tasks;
    std::vector<CounterDescriptor> counters;
    std::map<SeriesKey, CounterSeries> series;

    const CounterSeries* find_series(CounterId counter, CpuId cpu) const {
        auto it = series.find({counter, cpu});
        return it == series.end() ? nullptr : &it->second;
    }
    const CounterDescriptor* find_counter_by_name(const std::string& name) const;
};

// Groups loose samples into time-sorted per-(counter, cpu) series.
std::map<SeriesKey, CounterSeries> build_series(std::vector<CounterSample> samples);

// Structural equality up to canonical record ordering.
bool trace_equal(const Trace& a, const Trace& b);

enum class Severity { Error, Warning };

struct Violation {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::size_t record_index = 0;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool has_errors() const;
    std::size_t error_count() const;
};

// Violation codes emitted by validate().
namespace codes {
inline constexpr const char* overlap_state = "OVERLAP_STATE";
inline constexpr const char* overlap_task = "OVERLAP_TASK";
inline constexpr const char* non_monotone_counter = "NON_MONOTONE_COUNTER";
inline constexpr const char* out_of_range_timestamp = "OUT_OF_RANGE_TIMESTAMP";
inline constexpr const char* bad_cpu_index = "BAD_CPU_INDEX";
inline constexpr const char* dup_id = "DUP_ID";
inline constexpr const char* empty_interval = "EMPTY_INTERVAL";
inline constexpr const char* bad_trace_bounds = "BAD_TRACE_BOUNDS";
inline constexpr const char* span_overflow = "SPAN_OVERFLOW";
inline constexpr const char* unknown_counter = "UNKNOWN_COUNTER";
inline constexpr const char* task_not_covered = "TASK_NOT_COVERED_BY_EXEC_STATE";
}  // namespace codes

// Checks every model invariant and returns the violations as data.
ValidationReport validate(const Trace& trace);

inline std::int64_t task_duration(const TaskInstance& task) { return task.end - task.start; }

}  // namespace tpan
