#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tpan/counter_attr.hpp"

namespace tpan {

enum class GroupingKind { All, ByType, ByCpu, ByTypeAndCpu };

const char* grouping_name(GroupingKind kind);
std::optional<GroupingKind> grouping_from_name(const std::string& name);

struct GroupId {
    std::optional<std::string> task_type;
    std::optional<CpuId> cpu;

    std::string label() const;
    friend bool operator==(const GroupId&, const GroupId&) = default;
    friend auto operator<=>(const GroupId&, const GroupId&) = default;
};

struct VariationConfig {
    std::size_t min_group_size = 10;  // >= 3
    double min_cv = 0.10;
    // confidence level fixed at 0.95 (z = 1.96)
};

enum class Eligibility { Eligible, TooSmall, LowVariation };

struct VariationCheck {
    Eligibility status = Eligibility::TooSmall;
    double cv = 0.0;
    double lcb = 0.0;  // 95% lower confidence bound on cv
};

// Gate on duration variation: a group qualifies for regression only when
// the lower confidence bound on its coefficient of variation clears min_cv.
VariationCheck check_variation(std::span<const std::int64_t> durations,
                               const VariationConfig& config);

struct FitResult {
    double alpha = 0.0;  // slope, ticks per indicator unit
    double beta = 0.0;   // intercept, ticks
    double r2 = 0.0;     // clamped to [0, 1]
    std::size_t n_points = 0;
};

enum class FitError { TooFewPoints, DegenerateX, DegenerateY };

// Ordinary least squares with intercept, computed from centered sums.
std::variant<FitResult, FitError> fit_linear(std::span<const std::pair<double, double>> points);

struct RelevanceConfig {
    double r2_threshold = 0.80;
};

enum class SkipReason { TooSmall, LowVariation, DegenerateX, TooManyExclusions };

const char* skip_reason_name(SkipReason reason);

struct RelevanceFinding {
    GroupingKind grouping = GroupingKind::All;
    GroupId group;
    std::string indicator;
    std::optional<FitResult> fit;
    bool eligible = false;
    bool relevant = false;
    std::optional<SkipReason> skipped;
};

struct TaskGroup {
    GroupId id;
    std::vector<const TaskIndicatorRow*> rows;
};

// Deterministic partition: task_type lexicographic, then cpu ascending.
std::vector<TaskGroup> group_tasks(const TaskIndicatorTable& table, GroupingKind key);

// Full pass: for every (grouping, group, indicator) drop excluded rows,
// gate on duration variation, fit, and flag relevance by r2 threshold.
std::vector<RelevanceFinding> analyze(const TaskIndicatorTable& table,
                                      std::span<const GroupingKind> groupings,
                                      const VariationConfig& var_config,
                                      const RelevanceConfig& rel_config,
                                      double max_exclusion_fraction = 0.5);

}  // namespace tpan
