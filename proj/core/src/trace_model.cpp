#include "tpan/trace_model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace tpan {

std::string state_name(const StateKind& kind) {
    switch (kind.tag) {
        case StateKind::Tag::TaskExecution: return "task_execution";
        case StateKind::Tag::TaskCreation: return "task_creation";
        case StateKind::Tag::WorkStealing: return "work_stealing";
        case StateKind::Tag::Other: return kind.other_name;
    }
    return kind.other_name;
}

StateKind state_from_name(const std::string& name) {
    if (name == "task_execution") return StateKind::task_execution();
    if (name == "task_creation") return StateKind::task_creation();
    if (name == "work_stealing") return StateKind::work_stealing();
    return StateKind::other(name);
}

const CounterDescriptor* Trace::find_counter_by_name(const std::string& name) const {
    for (const auto& c : counters)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::map<SeriesKey, CounterSeries> build_series(std::vector<CounterSample> samples) {
    std::map<SeriesKey, CounterSeries> out;
    std::stable_sort(samples.begin(), samples.end(), [](const CounterSample& a, const CounterSample& b) {
        return std::tie(a.counter, a.cpu, a.t) < std::tie(b.counter, b.cpu, b.t);
    });
    for (const auto& s : samples) {
        auto& series = out[{s.counter, s.cpu}];
        series.counter = s.counter;
        series.cpu = s.cpu;
        series.samples.emplace_back(s.t, s.value);
    }
    return out;
}

namespace {

Trace canonicalized(const Trace& t) {
    Trace c = t;
    std::stable_sort(c.counters.begin(), c.counters.end(),
                     [](const auto& a, const auto& b) { return a.id < b.id; });
    std::stable_sort(c.state_intervals.begin(), c.state_intervals.end(), [](const auto& a, const auto& b) {
        return std::tie(a.cpu, a.start, a.end, a.kind) < std::tie(b.cpu, b.start, b.end, b.kind);
    });
    std::stable_sort(c.tasks.begin(), c.tasks.end(),
                     [](const auto& a, const auto& b) { return a.id < b.id; });
    return c;
}

}  // namespace

bool trace_equal(const Trace& a, const Trace& b) {
    Trace ca = canonicalized(a);
    Trace cb = canonicalized(b);
    return ca.num_cpus == cb.num_cpus && ca.trace_start == cb.trace_start &&
           ca.trace_end == cb.trace_end && ca.state_intervals == cb.state_intervals &&
           ca.tasks == cb.tasks && ca.counters == cb.counters && ca.series == cb.series;
}

bool ValidationReport::has_errors() const {
    return error_count() > 0;
}

std::size_t ValidationReport::error_count() const {
    std::size_t n = 0;
    for (const auto& v : violations)
        if (v.severity == Severity::Error)
            ++n;
    return n;
}

namespace {

struct Checker {
    const Trace& trace;
    ValidationReport report;

    void add(Severity sev, const char* code, std::string msg, std::size_t index) {
        report.violations.push_back({sev, code, std::move(msg), index});
    }

    bool in_bounds(Timestamp t) const {
        return t >= trace.trace_start && t <= trace.trace_end;
    }

    void check_bounds() {
        if (trace.num_cpus == 0)
            add(Severity::Error, codes::bad_cpu_index, "num_cpus must be positive", 0);
        if (trace.trace_start < 0 || !(trace.trace_start < trace.trace_end))
            add(Severity::Error, codes::bad_trace_bounds, "trace_start must precede trace_end", 0);
        __int128 span = static_cast<__int128>(trace.trace_end) - trace.trace_start;
        if (span * trace.num_cpus > static_cast<__int128>(INT64_MAX))
            add(Severity::Error, codes::span_overflow,
                "trace span times num_cpus exceeds 64-bit tick range", 0);
    }

    void check_counters() {
        std::unordered_set<CounterId> ids;
        std::unordered_set<std::string> names;
        for (std::size_t i = 0; i < trace.counters.size(); ++i) {
            const auto& c = trace.counters[i];
            if (c.id < 0 || !ids.insert(c.id).second)
                add(Severity::Error, codes::dup_id,
                    "duplicate or negative counter id " + std::to_string(c.id), i);
            if (c.name.empty() || !names.insert(c.name).second)
                add(Severity::Error, codes::dup_id, "duplicate or empty counter name '" + c.name + "'", i);
        }
    }

    void check_states() {
        for (std::size_t i = 0; i < trace.state_intervals.size(); ++i) {
            const auto& s = trace.state_intervals[i];
            if (s.cpu >= trace.num_cpus)
                add(Severity::Error, codes::bad_cpu_index,
                    "state interval on cpu " + std::to_string(s.cpu), i);
            if (!(s.start < s.end))
                add(Severity::Error, codes::empty_interval, "state interval with start >= end", i);
            else if (!in_bounds(s.start) || !in_bounds(s.end))
                add(Severity::Error, codes::out_of_range_timestamp,
                    "state interval outside trace bounds", i);
            if (s.kind.tag == StateKind::Tag::Other && s.kind.other_name.empty())
                add(Severity::Error, codes::empty_interval, "state interval with empty state name", i);
        }
        // Per-CPU overlap with half-open semantics; abutting intervals are fine.
        std::vector<std::size_t> order(trace.state_intervals.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = trace.state_intervals[a];
            const auto& y = trace.state_intervals[b];
            return std::tie(x.cpu, x.start) < std::tie(y.cpu, y.start);
        });
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto& prev = trace.state_intervals[order[k - 1]];
            const auto& cur = trace.state_intervals[order[k]];
            if (prev.cpu == cur.cpu && prev.end > cur.start)
                add(Severity::Error, codes::overlap_state,
                    "state intervals overlap on cpu " + std::to_string(cur.cpu), order[k]);
        }
    }

    void check_tasks() {
        std::unordered_set<TaskId> ids;
        for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
            const auto& t = trace.tasks[i];
            if (t.id < 0 || !ids.insert(t.id).second)
                add(Severity::Error, codes::dup_id, "duplicate or negative task id " + std::to_string(t.id), i);
            if (t.cpu >= trace.num_cpus)
                add(Severity::Error, codes::bad_cpu_index, "task on cpu " + std::to_string(t.cpu), i);
            if (!(t.start < t.end))
                add(Severity::Error, codes::empty_interval, "task with start >= end", i);
            else if (!in_bounds(t.start) || !in_bounds(t.end))
                add(Severity::Error, codes::out_of_range_timestamp, "task outside trace bounds", i);
        }
        std::vector<std::size_t> order(trace.tasks.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = trace.tasks[a];
            const auto& y = trace.tasks[b];
            return std::tie(x.cpu, x.start) < std::tie(y.cpu, y.start);
        });
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto& prev = trace.tasks[order[k - 1]];
            const auto& cur = trace.tasks[order[k]];
            if (prev.cpu == cur.cpu && prev.end > cur.start)
                add(Severity::Error, codes::overlap_task,
                    "tasks overlap on cpu " + std::to_string(cur.cpu), order[k]);
        }
    }

    void check_series() {
        std::unordered_set<CounterId> known;
        for (const auto& c : trace.counters)
            known.insert(c.id);
        for (const auto& [key, series] : trace.series) {
            if (!known.count(series.counter))
                add(Severity::Error, codes::unknown_counter,
                    "samples reference undefined counter " + std::to_string(series.counter), 0);
            if (series.cpu >= trace.num_cpus)
                add(Severity::Error, codes::bad_cpu_index,
                    "counter samples on cpu " + std::to_string(series.cpu), 0);
            for (std::size_t i = 0; i < series.samples.size(); ++i) {
                const auto& [t, v] = series.samples[i];
                if (!in_bounds(t))
                    add(Severity::Error, codes::out_of_range_timestamp,
                        "counter sample outside trace bounds", i);
                if (v < 0)
                    add(Severity::Error, codes::non_monotone_counter, "negative counter value", i);
                if (i > 0) {
                    const auto& [pt, pv] = series.samples[i - 1];
                    if (!(t > pt) || v < pv)
                        add(Severity::Error, codes::non_monotone_counter,
                            "counter " + std::to_string(series.counter) + " on cpu " +
                                std::to_string(series.cpu) + " is not monotone at sample " +
                                std::to_string(i),
                            i);
                }
            }
        }
    }

    // Warns about tasks whose span is not covered by TaskExecution intervals
    // on the executing CPU; instrumentation skew makes this common in real
    // traces, so it never blocks analysis.
    void check_task_coverage() {
        std::unordered_map<CpuId, std::vector<std::pair<Timestamp, Timestamp>>> exec;
        for (const auto& s : trace.state_intervals)
            if (s.kind.tag == StateKind::Tag::TaskExecution && s.start < s.end)
                exec[s.cpu].emplace_back(s.start, s.end);
        for (auto& [cpu, iv] : exec) {
            std::sort(iv.begin(), iv.end());
            // merge abutting/overlapping
            std::vector<std::pair<Timestamp, Timestamp>> merged;
            for (const auto& [a, b] : iv) {
                if (!merged.empty() && a <= merged.back().second)
                    merged.back().second = std::max(merged.back().second, b);
                else
                    merged.emplace_back(a, b);
            }
            iv = std::move(merged);
        }
        for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
            const auto& t = trace.tasks[i];
            if (!(t.start < t.end) || t.cpu >= trace.num_cpus)
                continue;
            bool covered = false;
            auto it = exec.find(t.cpu);
            if (it != exec.end()) {
                for (const auto& [a, b] : it->second) {
                    if (a <= t.start && t.end <= b) {
                        covered = true;
                        break;
                    }
                }
            }
            if (!covered)
                add(Severity::Warning, codes::task_not_covered,
                    "task " + std::to_string(t.id) + " is not covered by task_execution intervals", i);
        }
    }
};

}  // namespace

ValidationReport validate(const Trace& trace) {
    Checker checker{trace, {}};
    checker.check_bounds();
    checker.check_counters();
    checker.check_states();
    checker.check_tasks();
    checker.check_series();
    checker.check_task_coverage();
    return checker.report;
}

}  // namespace tpan
