#include <doctest.h>

#include <cmath>
#include <random>

#include "tpan/regression.hpp"
#include "tpan/synth_gen.hpp"

using namespace tpan;

namespace {

TaskIndicatorTable table_from(const std::vector<std::tuple<std::string, CpuId, std::int64_t, double>>& rows) {
    TaskIndicatorTable table;
    IndicatorDef def;
    def.name = "x";
    table.defs.push_back(def);
    TaskId id = 0;
    for (const auto& [type, cpu, duration, x] : rows) {
        TaskIndicatorRow row;
        row.id = id++;
        row.task_type = type;
        row.cpu = cpu;
        row.duration = duration;
        row.cells.push_back(x);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Independent textbook OLS on raw sums, in extended precision.
void naive_ols(std::span<const std::pair<double, double>> pts, double& alpha, double& beta) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long double n = static_cast<long double>(pts.size());
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += static_cast<long double>(x) * x;
        sxy += static_cast<long double>(x) * y;
    }
    long double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    alpha = static_cast<double>(a);
    beta = static_cast<double>((sy - a * sx) / n);
}

double sse(std::span<const std::pair<double, double>> pts, double alpha, double beta) {
    double total = 0;
    for (const auto& [x, y] : pts) {
        double r = y - alpha * x - beta;
        total += r * r;
    }
    return total;
}

}  // namespace

TEST_CASE("grouping partitions tasks deterministically") {
    auto table = table_from({{"a", 0, 10, 1.0},
                             {"a", 1, 11, 1.0},
                             {"b", 0, 12, 1.0},
                             {"b", 1, 13, 1.0},
                             {"b", 0, 14, 1.0},
                             {"a", 0, 15, 1.0}});
    auto all = group_tasks(table, GroupingKind::All);
    REQUIRE(all.size() == 1);
    CHECK(all[0].rows.size() == 6);

    auto by_type = group_tasks(table, GroupingKind::ByType);
    REQUIRE(by_type.size() == 2);
    CHECK(*by_type[0].id.task_type == "a");
    CHECK(by_type[0].rows.size() == 3);
    CHECK(by_type[1].rows.size() == 3);

    auto by_both = group_tasks(table, GroupingKind::ByTypeAndCpu);
    REQUIRE(by_both.size() == 4);
    CHECK(by_both[0].id.label() == "a@cpu0");
    CHECK(by_both[0].rows.size() == 2);
}

TEST_CASE("variation gate") {
    VariationConfig config;
    SUBCASE("all equal durations") {
        std::vector<std::int64_t> d(20, 500);
        CHECK(check_variation(d, config).status == Eligibility::LowVariation);
    }
    SUBCASE("too small") {
        std::vector<std::int64_t> d{1, 2, 3, 4, 5};
        CHECK(check_variation(d, config).status == Eligibility::TooSmall);
    }
    SUBCASE("wide uniform sample is eligible") {
        std::mt19937 rng(13);
        std::vector<std::int64_t> d;
        for (int i = 0; i < 100; ++i)
            d.push_back(1000 + std::uniform_int_distribution<std::int64_t>(-500, 500)(rng));
        VariationCheck check = check_variation(d, config);
        CHECK(check.status == Eligibility::Eligible);
        CHECK(check.cv > 0.2);

        // direct evaluation of the LCB formula
        double mean = 0;
        for (auto v : d)
            mean += static_cast<double>(v);
        mean /= 100.0;
        double ss = 0;
        for (auto v : d)
            ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
        double cv = std::sqrt(ss / 99.0) / mean;
        double lcb = cv - 1.96 * cv * std::sqrt(1.0 / (2.0 * 99.0) + cv * cv / 100.0);
        CHECK(check.cv == doctest::Approx(cv).epsilon(1e-12));
        CHECK(check.lcb == doctest::Approx(lcb).epsilon(1e-12));
    }
}

TEST_CASE("fit_linear on an exact line") {
    std::vector<std::pair<double, double>> pts{{1, 3}, {2, 5}, {3, 7}};
    auto fit = std::get<FitResult>(fit_linear(pts));
    CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_linear matches the brute-force oracle") {
    std::vector<std::pair<double, double>> pts{{1, 2}, {2, 4}, {3, 5}, {4, 8}};
    auto fit = std::get<FitResult>(fit_linear(pts));
    CHECK(fit.alpha == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(fit.beta == doctest::Approx(0.0));
    CHECK(fit.r2 == doctest::Approx(1.0 - 0.7 / 18.75).epsilon(1e-9));

    // no point on a fine grid around the fit beats its SSE
    double best = sse(pts, fit.alpha, fit.beta);
    for (int i = -10; i <= 10; ++i) {
        for (int j = -10; j <= 10; ++j) {
            double a = fit.alpha + 0.01 * i;
            double b = fit.beta + 0.01 * j;
            CHECK(best <= sse(pts, a, b) + 1e-12);
        }
    }
}

TEST_CASE("fit_linear degenerate inputs") {
    std::vector<std::pair<double, double>> flat_x{{5, 1}, {5, 2}, {5, 3}};
    CHECK(std::get<FitError>(fit_linear(flat_x)) == FitError::DegenerateX);
    std::vector<std::pair<double, double>> flat_y{{1, 4}, {2, 4}, {3, 4}};
    CHECK(std::get<FitError>(fit_linear(flat_y)) == FitError::DegenerateY);
    std::vector<std::pair<double, double>> two{{1, 2}, {3, 4}};
    CHECK(std::get<FitError>(fit_linear(two)) == FitError::TooFewPoints);
}

TEST_CASE("fit matches an independent implementation on random data") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> xd(0.0, 10.0);
    std::uniform_real_distribution<double> yd(-5.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = std::uniform_int_distribution<std::size_t>(3, 50)(rng);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.emplace_back(xd(rng), yd(rng));
        auto fitted = fit_linear(pts);
        if (std::holds_alternative<FitError>(fitted))
            continue;
        auto fit = std::get<FitResult>(fitted);
        double a, b;
        naive_ols(pts, a, b);
        CHECK(fit.alpha == doctest::Approx(a).epsilon(1e-9));
        CHECK(fit.beta == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("r2 invariances") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> xd(1.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = std::uniform_int_distribution<std::size_t>(5, 30)(rng);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < n; ++i) {
            double x = xd(rng);
            pts.emplace_back(x, 3.0 * x + xd(rng));
        }
        auto base = std::get<FitResult>(fit_linear(pts));

        double c = xd(rng);
        auto shifted = pts;
        for (auto& [x, y] : shifted)
            y += c;
        auto fit_shift = std::get<FitResult>(fit_linear(shifted));
        CHECK(fit_shift.alpha == doctest::Approx(base.alpha).epsilon(1e-9));
        CHECK(fit_shift.beta == doctest::Approx(base.beta + c).epsilon(1e-9));
        CHECK(fit_shift.r2 == doctest::Approx(base.r2).epsilon(1e-9));

        double k = 0.5 + xd(rng);
        auto scaled = pts;
        for (auto& [x, y] : scaled)
            x *= k;
        auto fit_scale = std::get<FitResult>(fit_linear(scaled));
        CHECK(fit_scale.alpha == doctest::Approx(base.alpha / k).epsilon(1e-9));
        CHECK(fit_scale.beta == doctest::Approx(base.beta).epsilon(1e-9));
        CHECK(fit_scale.r2 == doctest::Approx(base.r2).epsilon(1e-9));
    }
}

TEST_CASE("analyze skips gated groups and never marks them relevant") {
    std::vector<std::tuple<std::string, CpuId, std::int64_t, double>> rows;
    for (int i = 0; i < 20; ++i)
        rows.emplace_back("flat", 0, 100, static_cast<double>(i));
    auto table = table_from(rows);
    GroupingKind groupings[] = {GroupingKind::ByType};
    auto findings = analyze(table, groupings, VariationConfig{}, RelevanceConfig{});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].skipped == SkipReason::LowVariation);
    CHECK(!findings[0].relevant);
    CHECK(!findings[0].fit.has_value());
}

TEST_CASE("analyze flags exclusion-heavy groups") {
    TaskIndicatorTable table;
    IndicatorDef def;
    def.name = "x";
    table.defs.push_back(def);
    for (int i = 0; i < 20; ++i) {
        TaskIndicatorRow row;
        row.id = i;
        row.task_type = "t";
        row.cpu = 0;
        row.duration = 100 + i * 13;
        if (i < 12)
            row.cells.push_back(ExclusionReason::NoBracketingSamples);
        else
            row.cells.push_back(static_cast<double>(i));
        table.rows.push_back(std::move(row));
    }
    GroupingKind groupings[] = {GroupingKind::ByType};
    auto findings = analyze(table, groupings, VariationConfig{}, RelevanceConfig{}, 0.5);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].skipped == SkipReason::TooManyExclusions);
}

TEST_CASE("analyze recovers a planted linear model end to end") {
    SynthSpec spec;
    spec.num_cpus = 2;
    spec.duration = 40000;
    spec.state_period = 40000;
    SynthTaskPlan plan;
    plan.task_type = "w";
    plan.count = 100;
    plan.beta = 50;
    plan.terms.push_back({"r", 400.0, 0.0, 0.5});
    spec.tasks.push_back(plan);
    SynthIndicatorPlan ind;
    ind.name = "r";
    ind.kind = SynthIndicatorPlan::Kind::Ratio;
    ind.counter = "cache_misses";
    ind.denominator = "cache_accesses";
    ind.denominator_delta = 1e7;
    spec.indicators.push_back(ind);
    spec.sampling_period = 1000;

    SynthResult result = generate(spec, 23);
    auto table = build_table(result.trace,
                             {parse_indicator_spec(result.trace, "ratio:cache_misses/cache_accesses")});
    GroupingKind groupings[] = {GroupingKind::ByType};
    auto findings = analyze(table, groupings, VariationConfig{}, RelevanceConfig{});
    REQUIRE(findings.size() == 1);
    const auto& f = findings[0];
    REQUIRE(f.fit.has_value());
    CHECK(f.relevant);
    CHECK(f.fit->r2 >= 0.999);
    CHECK(f.fit->alpha == doctest::Approx(400.0).epsilon(0.01));
    CHECK(std::abs(f.fit->beta - 50.0) <= 5.0);
}
