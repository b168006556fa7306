#pragma once

#include <string>
#include <vector>

#include "tpan/counter_attr.hpp"
#include "tpan/regression.hpp"
#include "tpan/state_analysis.hpp"

namespace tpan {

// Everything the analyses were configured with, echoed into the report.
struct ReportConfig {
    ThresholdConfig thresholds;
    int window_count = 1;
    VariationConfig variation;
    RelevanceConfig relevance;
    double max_exclusion_fraction = 0.5;
    std::vector<GroupingKind> groupings;
    std::vector<std::string> indicator_specs;
};

struct Report {
    std::uint32_t num_cpus = 0;
    Timestamp trace_start = 0;
    Timestamp trace_end = 0;
    std::size_t task_count = 0;
    std::vector<std::string> counter_names;  // by counter id
    ReportConfig config;
    std::vector<WindowResult> windows;
    std::vector<RelevanceFinding> relevance;
    std::map<ExclusionReason, std::size_t> exclusions;
    std::vector<std::string> caveats;
};

const char* cause_kind_name(CauseKind kind);

// Assembles the report; table may be null when only the state analysis ran.
Report build_report(const Trace& trace, std::vector<WindowResult> windows,
                    std::vector<RelevanceFinding> findings, const TaskIndicatorTable* table,
                    ReportConfig config);

// Byte-deterministic JSON document with fixed key order; reals carry at
// most 12 significant digits.
std::string render_json(const Report& report);

// Human-readable summary; not contract-stable.
std::string render_text(const Report& report);

}  // namespace tpan
