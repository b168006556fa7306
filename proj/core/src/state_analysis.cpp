#include "tpan/state_analysis.hpp"

#include <algorithm>

namespace tpan {

std::int64_t StateAggregate::total(StateKind::Tag tag) const {
    std::int64_t sum = 0;
    for (const auto& [key, ticks] : state_time)
        if (key.second.tag == tag)
            sum += ticks;
    return sum;
}

std::int64_t StateAggregate::per_cpu(CpuId cpu, StateKind::Tag tag) const {
    std::int64_t sum = 0;
    for (const auto& [key, ticks] : state_time)
        if (key.first == cpu && key.second.tag == tag)
            sum += ticks;
    return sum;
}

StateAggregate aggregate_states(const Trace& trace, AnalysisWindow window) {
    if (!(window.start < window.end) || window.start < trace.trace_start ||
        window.end > trace.trace_end)
        throw WindowOutOfRange("analysis window outside trace bounds");
    StateAggregate agg;
    agg.window = window;
    agg.num_cpus = trace.num_cpus;
    agg.window_ticks = window.length();
    for (const auto& s : trace.state_intervals) {
        Timestamp lo = std::max(s.start, window.start);
        Timestamp hi = std::min(s.end, window.end);
        if (lo < hi)
            agg.state_time[{s.cpu, s.kind}] += hi - lo;
    }
    return agg;
}

ParallelismVerdict check_parallelism(const StateAggregate& agg, Rational t_exec) {
    ParallelismVerdict verdict;
    verdict.total_exec = agg.total(StateKind::Tag::TaskExecution);
    __int128 nd = static_cast<__int128>(agg.num_cpus) * agg.window_ticks;
    // Strict inequality, evaluated without floating point:
    //   total_exec < t_exec * n * d   <=>   total_exec * den < num * n * d
    verdict.sufficient =
        !(static_cast<__int128>(verdict.total_exec) * t_exec.den < t_exec.num * nd);
    verdict.bound = t_exec.to_double() * static_cast<double>(agg.num_cpus) *
                    static_cast<double>(agg.window_ticks);
    verdict.exec_fraction = static_cast<double>(verdict.total_exec) / static_cast<double>(nd);
    return verdict;
}

std::vector<Cause> diagnose_causes(const StateAggregate& agg, const ThresholdConfig& config) {
    __int128 nd = static_cast<__int128>(agg.num_cpus) * agg.window_ticks;
    std::int64_t create = agg.total(StateKind::Tag::TaskCreation);
    std::int64_t steal = agg.total(StateKind::Tag::WorkStealing);

    auto above = [nd](std::int64_t ticks, Rational threshold) {
        return static_cast<__int128>(ticks) * threshold.den > threshold.num * nd;
    };

    std::vector<Cause> causes;
    if (above(create, config.t_create))
        causes.push_back({CauseKind::CreationOverhead,
                          static_cast<double>(create) / static_cast<double>(nd),
                          config.t_create.to_double()});
    if (above(steal, config.t_steal))
        causes.push_back({CauseKind::WorkStealingDominant,
                          static_cast<double>(steal) / static_cast<double>(nd),
                          config.t_steal.to_double()});
    std::sort(causes.begin(), causes.end(),
              [](const Cause& a, const Cause& b) { return a.fraction > b.fraction; });
    if (causes.empty())
        causes.push_back({CauseKind::Unattributed, 0.0, 0.0});
    return causes;
}

std::vector<WindowResult> windowed_analysis(const Trace& trace, int window_count,
                                            const ThresholdConfig& config) {
    std::vector<WindowResult> results;
    if (window_count < 1)
        return results;
    std::int64_t span = trace.trace_end - trace.trace_start;
    std::int64_t width = span / window_count;
    if (width < 1)
        width = 1;
    for (int w = 0; w < window_count; ++w) {
        AnalysisWindow window;
        window.start = trace.trace_start + static_cast<std::int64_t>(w) * width;
        window.end = w + 1 == window_count ? trace.trace_end : window.start + width;
        if (!(window.start < window.end))
            break;  // degenerate: more windows than ticks
        WindowResult result;
        result.window = window;
        result.aggregate = aggregate_states(trace, window);
        result.verdict = check_parallelism(result.aggregate, config.t_exec);
        if (!result.verdict.sufficient)
            result.causes = diagnose_causes(result.aggregate, config);
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace tpan
