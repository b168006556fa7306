#include "tpan/regression.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tpan {

const char* grouping_name(GroupingKind kind) {
    switch (kind) {
        case GroupingKind::All: return "all";
        case GroupingKind::ByType: return "type";
        case GroupingKind::ByCpu: return "cpu";
        case GroupingKind::ByTypeAndCpu: return "type-cpu";
    }
    return "?";
}

std::optional<GroupingKind> grouping_from_name(const std::string& name) {
    if (name == "all") return GroupingKind::All;
    if (name == "type") return GroupingKind::ByType;
    if (name == "cpu") return GroupingKind::ByCpu;
    if (name == "type-cpu") return GroupingKind::ByTypeAndCpu;
    return std::nullopt;
}

std::string GroupId::label() const {
    std::string out;
    if (task_type)
        out = *task_type;
    if (cpu) {
        if (!out.empty())
            out += "@";
        out += "cpu" + std::to_string(*cpu);
    }
    return out.empty() ? "all" : out;
}

const char* skip_reason_name(SkipReason reason) {
    switch (reason) {
        case SkipReason::TooSmall: return "too_small";
        case SkipReason::LowVariation: return "low_variation";
        case SkipReason::DegenerateX: return "degenerate_x";
        case SkipReason::TooManyExclusions: return "too_many_exclusions";
    }
    return "?";
}

std::vector<TaskGroup> group_tasks(const TaskIndicatorTable& table, GroupingKind key) {
    std::map<GroupId, std::vector<const TaskIndicatorRow*>> buckets;
    for (const auto& row : table.rows) {
        GroupId id;
        if (key == GroupingKind::ByType || key == GroupingKind::ByTypeAndCpu)
            id.task_type = row.task_type;
        if (key == GroupingKind::ByCpu || key == GroupingKind::ByTypeAndCpu)
            id.cpu = row.cpu;
        buckets[id].push_back(&row);
    }
    std::vector<TaskGroup> groups;
    for (auto& [id, rows] : buckets)
        groups.push_back({id, std::move(rows)});
    return groups;
}

VariationCheck check_variation(std::span<const std::int64_t> durations,
                               const VariationConfig& config) {
    VariationCheck check;
    std::size_t n = durations.size();
    if (n < config.min_group_size || n < 3) {
        check.status = Eligibility::TooSmall;
        return check;
    }
    double mean = 0.0;
    for (std::int64_t d : durations)
        mean += static_cast<double>(d);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::int64_t d : durations) {
        double diff = static_cast<double>(d) - mean;
        ss += diff * diff;
    }
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    check.cv = sd / mean;  // mean > 0: durations are >= 1
    // Normal-approximation 95% lower bound on the coefficient of variation.
    double se = check.cv * std::sqrt(1.0 / (2.0 * static_cast<double>(n - 1)) +
                                     check.cv * check.cv / static_cast<double>(n));
    check.lcb = check.cv - 1.96 * se;
    check.status = check.lcb >= config.min_cv ? Eligibility::Eligible : Eligibility::LowVariation;
    return check;
}

std::variant<FitResult, FitError> fit_linear(std::span<const std::pair<double, double>> points) {
    std::size_t n = points.size();
    if (n < 3)
        return FitError::TooFewPoints;
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        double dx = x - mean_x;
        double dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        return FitError::DegenerateX;
    if (syy == 0.0)
        return FitError::DegenerateY;

    FitResult fit;
    fit.alpha = sxy / sxx;
    fit.beta = mean_y - fit.alpha * mean_x;
    fit.n_points = n;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        double r = y - fit.alpha * x - fit.beta;
        ss_res += r * r;
    }
    fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return fit;
}

std::vector<RelevanceFinding> analyze(const TaskIndicatorTable& table,
                                      std::span<const GroupingKind> groupings,
                                      const VariationConfig& var_config,
                                      const RelevanceConfig& rel_config,
                                      double max_exclusion_fraction) {
    std::vector<RelevanceFinding> findings;
    for (GroupingKind grouping : groupings) {
        for (const auto& group : group_tasks(table, grouping)) {
            for (std::size_t d = 0; d < table.defs.size(); ++d) {
                RelevanceFinding finding;
                finding.grouping = grouping;
                finding.group = group.id;
                finding.indicator = table.defs[d].name;

                std::vector<std::pair<double, double>> points;
                std::vector<std::int64_t> durations;
                for (const TaskIndicatorRow* row : group.rows) {
                    const CellValue& cell = row->cells[d];
                    if (is_excluded(cell))
                        continue;
                    points.emplace_back(std::get<double>(cell),
                                        static_cast<double>(row->duration));
                    durations.push_back(row->duration);
                }
                double dropped = static_cast<double>(group.rows.size() - points.size());
                if (dropped / static_cast<double>(group.rows.size()) > max_exclusion_fraction) {
                    finding.skipped = SkipReason::TooManyExclusions;
                    findings.push_back(std::move(finding));
                    continue;
                }

                VariationCheck gate = check_variation(durations, var_config);
                if (gate.status == Eligibility::TooSmall) {
                    finding.skipped = SkipReason::TooSmall;
                    findings.push_back(std::move(finding));
                    continue;
                }
                if (gate.status == Eligibility::LowVariation) {
                    finding.skipped = SkipReason::LowVariation;
                    findings.push_back(std::move(finding));
                    continue;
                }
                finding.eligible = true;

                auto fitted = fit_linear(points);
                if (std::holds_alternative<FitError>(fitted)) {
                    // DegenerateY cannot pass the gate; anything else is a flat x.
                    finding.eligible = false;
                    finding.skipped = SkipReason::DegenerateX;
                    findings.push_back(std::move(finding));
                    continue;
                }
                finding.fit = std::get<FitResult>(fitted);
                finding.relevant = finding.fit->r2 >= rel_config.r2_threshold;
                findings.push_back(std::move(finding));
            }
        }
    }
    std::stable_sort(findings.begin(), findings.end(),
                     [](const RelevanceFinding& a, const RelevanceFinding& b) {
                         double ar2 = a.fit ? a.fit->r2 : -1.0;
                         double br2 = b.fit ? b.fit->r2 : -1.0;
                         std::size_t an = a.fit ? a.fit->n_points : 0;
                         std::size_t bn = b.fit ? b.fit->n_points : 0;
                         auto ka = std::make_tuple(!a.relevant, -ar2, -static_cast<std::int64_t>(an));
                         auto kb = std::make_tuple(!b.relevant, -br2, -static_cast<std::int64_t>(bn));
                         if (ka != kb)
                             return ka < kb;
                         return std::tie(a.group, a.indicator, a.grouping) <
                                std::tie(b.group, b.indicator, b.grouping);
                     });
    return findings;
}

}  // namespace tpan
