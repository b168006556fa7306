#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "tpan/rational.hpp"
#include "tpan/trace_model.hpp"

namespace tpan {

struct AnalysisWindow {
    Timestamp start = 0;
    Timestamp end = 0;

    std::int64_t length() const { return end - start; }
    friend bool operator==(const AnalysisWindow&, const AnalysisWindow&) = default;
};

struct ThresholdConfig {
    Rational t_exec{19, 20};   // 0.95
    Rational t_create{1, 20};  // 0.05
    Rational t_steal{1, 10};   // 0.10
};

// Per-CPU, per-state accumulated time within one window.
struct StateAggregate {
    AnalysisWindow window;
    std::uint32_t num_cpus = 0;
    std::int64_t window_ticks = 0;
    std::map<std::pair<CpuId, StateKind>, std::int64_t> state_time;

    std::int64_t total(StateKind::Tag tag) const;
    std::int64_t per_cpu(CpuId cpu, StateKind::Tag tag) const;
};

struct ParallelismVerdict {
    bool sufficient = true;
    std::int64_t total_exec = 0;
    double bound = 0.0;          // t_exec * n * d
    double exec_fraction = 0.0;  // total_exec / (n * d)
};

enum class CauseKind { CreationOverhead, WorkStealingDominant, Unattributed };

struct Cause {
    CauseKind kind = CauseKind::Unattributed;
    double fraction = 0.0;
    double threshold = 0.0;
};

class WindowOutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Clips every state interval against the window and accumulates overlap
// lengths per (cpu, state). Exact integer arithmetic.
StateAggregate aggregate_states(const Trace& trace, AnalysisWindow window);

// The machine saturation test: insufficient iff sum of per-CPU execution
// time is strictly below t_exec * n * d, compared exactly in integers.
ParallelismVerdict check_parallelism(const StateAggregate& agg, Rational t_exec);

// Refines an insufficient verdict: creation or stealing fraction above its
// threshold, otherwise Unattributed. Ordered by descending fraction.
std::vector<Cause> diagnose_causes(const StateAggregate& agg, const ThresholdConfig& config);

struct WindowResult {
    AnalysisWindow window;
    ParallelismVerdict verdict;
    std::vector<Cause> causes;  // only populated for insufficient windows
    StateAggregate aggregate;
};

// Partitions the trace span into window_count equal windows (remainder
// ticks go to the last) and runs aggregate -> check -> diagnose on each.
std::vector<WindowResult> windowed_analysis(const Trace& trace, int window_count,
                                            const ThresholdConfig& config);

}  // namespace tpan
