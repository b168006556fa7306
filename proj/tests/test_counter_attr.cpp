#include <doctest.h>

#include <random>

#include "test_helpers.hpp"
#include "tpan/counter_attr.hpp"
#include "tpan/synth_gen.hpp"

using namespace tpan;

namespace {

CounterSeries make_series(std::vector<std::pair<Timestamp, std::int64_t>> samples) {
    CounterSeries s;
    s.counter = 0;
    s.cpu = 0;
    s.samples = std::move(samples);
    return s;
}

}  // namespace

TEST_CASE("counter_value interpolates linearly") {
    CounterSeries s = make_series({{0, 0}, {100, 200}});
    CHECK(*counter_value(s, 50) == doctest::Approx(100.0));
    CHECK(*counter_value(s, 100) == 200.0);
    CHECK(*counter_value(s, 0) == 0.0);
    CHECK(!counter_value(s, 150).has_value());
    CHECK(!counter_value(s, -5).has_value());
}

TEST_CASE("task_delta from bracketing samples") {
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 1000;
    t.counters = {{0, "c"}};
    t.series = build_series({{0, 0, 100, 1000}, {0, 0, 500, 2000}});
    TaskInstance task{0, "w", 0, 100, 500};

    CellValue delta = task_delta(t, task, 0);
    REQUIRE(!is_excluded(delta));
    CHECK(std::get<double>(delta) == doctest::Approx(1000.0));

    SUBCASE("no bracketing samples") {
        t.series = build_series({{0, 0, 200, 10}, {0, 0, 400, 20}});
        CHECK(std::get<ExclusionReason>(task_delta(t, task, 0)) ==
              ExclusionReason::NoBracketingSamples);
    }
    SUBCASE("missing series") {
        CHECK(std::get<ExclusionReason>(task_delta(t, task, 7)) == ExclusionReason::SeriesMissing);
    }
}

TEST_CASE("indicator kinds") {
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 1000;
    t.counters = {{0, "cache_misses"}, {1, "cache_accesses"}};
    t.series = build_series({{0, 0, 100, 0},
                             {0, 0, 500, 50},
                             {1, 0, 100, 0},
                             {1, 0, 500, 1000}});
    TaskInstance task{0, "w", 0, 100, 500};

    IndicatorDef ratio{"miss_rate", IndicatorDef::Kind::Ratio, 0, 1};
    CHECK(std::get<double>(indicator_value(t, task, ratio)) == doctest::Approx(0.05));

    IndicatorDef rate{"access_rate", IndicatorDef::Kind::TimeRate, 1, -1};
    CHECK(std::get<double>(indicator_value(t, task, rate)) == doctest::Approx(2.5));

    SUBCASE("zero denominator") {
        t.series = build_series({{0, 0, 100, 0},
                                 {0, 0, 500, 50},
                                 {1, 0, 100, 7},
                                 {1, 0, 500, 7}});
        CHECK(std::get<ExclusionReason>(indicator_value(t, task, ratio)) ==
              ExclusionReason::ZeroDenominator);
    }
}

TEST_CASE("indicator spec grammar") {
    Trace t = testing::small_trace();
    IndicatorDef def = parse_indicator_spec(t, "delta:cache_accesses");
    CHECK(def.kind == IndicatorDef::Kind::RawDelta);
    CHECK(def.counter == 0);
    CHECK(parse_indicator_spec(t, "rate:cache_accesses").kind == IndicatorDef::Kind::TimeRate);
    CHECK_THROWS_AS(parse_indicator_spec(t, "delta:nope"), std::invalid_argument);
    CHECK_THROWS_AS(parse_indicator_spec(t, "ratio:cache_accesses"), std::invalid_argument);
    CHECK_THROWS_AS(parse_indicator_spec(t, "cache_accesses"), std::invalid_argument);
}

TEST_CASE("default indicators pair _misses with _accesses") {
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 10;
    t.counters = {{0, "l2_misses"}, {1, "l2_accesses"}, {2, "branches"}};
    auto defs = default_indicators(t);
    REQUIRE(defs.size() == 4);  // three deltas plus one ratio
    CHECK(defs[3].kind == IndicatorDef::Kind::Ratio);
    CHECK(defs[3].name == "ratio:l2_misses/l2_accesses");
}

TEST_CASE("build_table preserves task order and counts exclusions") {
    Trace t = testing::small_trace();
    auto table = build_table(t, {parse_indicator_spec(t, "delta:cache_accesses")});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].id == 0);  // starts at 100, before task 1 at 200
    CHECK(table.rows[1].id == 1);
    CHECK(table.exclusion_counts.empty());
    CHECK(std::get<double>(table.rows[0].cells[0]) == doctest::Approx(800.0));
}

TEST_CASE("table values match the planted-truth ledger") {
    SynthSpec spec;
    spec.num_cpus = 2;
    spec.duration = 50000;
    spec.state_period = 50000;
    SynthTaskPlan plan;
    plan.task_type = "w";
    plan.count = 40;
    plan.beta = 50;
    plan.terms.push_back({"r", 400.0, 0.0, 0.5});
    spec.tasks.push_back(plan);
    SynthIndicatorPlan ind;
    ind.name = "r";
    ind.kind = SynthIndicatorPlan::Kind::Ratio;
    ind.counter = "cache_misses";
    ind.denominator = "cache_accesses";
    ind.denominator_delta = 1e6;
    spec.indicators.push_back(ind);
    spec.sampling_period = 1000;
    spec.boundary_samples = true;

    SynthResult result = generate(spec, 9);
    auto table =
        build_table(result.trace, {parse_indicator_spec(result.trace, "ratio:cache_misses/cache_accesses")});
    REQUIRE(table.rows.size() == result.planted.size());

    std::map<TaskId, double> truth;
    for (const auto& p : result.planted)
        truth[p.id] = p.indicator_values.at("r");
    for (const auto& row : table.rows) {
        REQUIRE(!is_excluded(row.cells[0]));
        double measured = std::get<double>(row.cells[0]);
        CHECK(measured == doctest::Approx(truth.at(row.id)).epsilon(1e-9));
    }
}

TEST_CASE("interpolation is exact on linear truth and monotone") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        // sample a linear function v(t) = a + b t on random grid points
        std::int64_t a = std::uniform_int_distribution<std::int64_t>(0, 1000)(rng);
        std::int64_t b = std::uniform_int_distribution<std::int64_t>(0, 20)(rng);
        std::vector<Timestamp> times;
        for (int i = 0; i < 10; ++i)
            times.push_back(std::uniform_int_distribution<Timestamp>(0, 10000)(rng));
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        if (times.size() < 2)
            continue;
        std::vector<std::pair<Timestamp, std::int64_t>> samples;
        for (Timestamp ts : times)
            samples.emplace_back(ts, a + b * ts);
        CounterSeries s = make_series(samples);

        double prev = -1.0;
        for (Timestamp q = times.front(); q <= times.back();
             q += std::max<Timestamp>(1, (times.back() - times.front()) / 37)) {
            double v = *counter_value(s, q);
            double expected = static_cast<double>(a) + static_cast<double>(b) * q;
            CHECK(v == doctest::Approx(expected).epsilon(1e-12));
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("task_delta additivity at an interior split") {
    std::mt19937 rng(6);
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 1000;
    t.counters = {{0, "c"}};
    std::vector<CounterSample> samples;
    std::int64_t v = 0;
    for (Timestamp ts = 0; ts <= 1000; ts += 50) {
        samples.push_back({0, 0, ts, v});
        v += std::uniform_int_distribution<std::int64_t>(0, 300)(rng);
    }
    t.series = build_series(std::move(samples));

    for (int trial = 0; trial < 50; ++trial) {
        Timestamp s = std::uniform_int_distribution<Timestamp>(0, 900)(rng);
        Timestamp e = std::uniform_int_distribution<Timestamp>(s + 2, 1000)(rng);
        Timestamp m = std::uniform_int_distribution<Timestamp>(s + 1, e - 1)(rng);
        TaskInstance whole{0, "w", 0, s, e};
        TaskInstance left{1, "w", 0, s, m};
        TaskInstance right{2, "w", 0, m, e};
        double d_whole = std::get<double>(task_delta(t, whole, 0));
        double d_left = std::get<double>(task_delta(t, left, 0));
        double d_right = std::get<double>(task_delta(t, right, 0));
        CHECK(d_whole == doctest::Approx(d_left + d_right).epsilon(1e-12));
    }
}
