#include <doctest.h>

#include "test_helpers.hpp"
#include "tpan/trace_model.hpp"

using namespace tpan;

namespace {

bool has_error(const ValidationReport& report, const char* code) {
    for (const auto& v : report.violations)
        if (v.severity == Severity::Error && v.code == code)
            return true;
    return false;
}

bool has_warning(const ValidationReport& report, const char* code) {
    for (const auto& v : report.violations)
        if (v.severity == Severity::Warning && v.code == code)
            return true;
    return false;
}

}  // namespace

TEST_CASE("valid trace yields an empty report") {
    Trace t = testing::small_trace();
    CHECK(validate(t).violations.empty());
}

TEST_CASE("adjacent half-open intervals do not overlap") {
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 20;
    t.state_intervals = {
        {0, StateKind::task_execution(), 0, 10},
        {0, StateKind::task_execution(), 10, 20},
    };
    CHECK(validate(t).violations.empty());
}

TEST_CASE("overlapping state intervals are flagged") {
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 20;
    t.state_intervals = {
        {0, StateKind::task_execution(), 0, 11},
        {0, StateKind::task_execution(), 10, 20},
    };
    CHECK(has_error(validate(t), codes::overlap_state));
}

TEST_CASE("decreasing absolute counter is non-monotone") {
    Trace t;
    t.num_cpus = 1;
    t.trace_start = 0;
    t.trace_end = 10;
    t.counters = {{0, "c"}};
    t.series = build_series({{0, 0, 5, 100}, {0, 0, 9, 90}});
    ValidationReport report = validate(t);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].code == codes::non_monotone_counter);
    CHECK(report.violations[0].record_index == 1);
}

TEST_CASE("task on cpu beyond num_cpus") {
    Trace t;
    t.num_cpus = 4;
    t.trace_start = 0;
    t.trace_end = 100;
    t.tasks = {{0, "w", 7, 0, 10}};
    ValidationReport report = validate(t);
    CHECK(report.error_count() == 1);
    CHECK(has_error(report, codes::bad_cpu_index));
}

TEST_CASE("each broken invariant maps to its error code") {
    Trace base = testing::small_trace();
    REQUIRE(validate(base).violations.empty());

    SUBCASE("overlapping tasks") {
        Trace t = base;
        t.tasks.push_back({2, "work", 0, 400, 600});
        CHECK(has_error(validate(t), codes::overlap_task));
    }
    SUBCASE("duplicate task id") {
        Trace t = base;
        t.tasks.push_back({0, "work", 0, 600, 700});
        CHECK(has_error(validate(t), codes::dup_id));
    }
    SUBCASE("duplicate counter name") {
        Trace t = base;
        t.counters.push_back({1, "cache_accesses"});
        CHECK(has_error(validate(t), codes::dup_id));
    }
    SUBCASE("timestamp outside trace bounds") {
        Trace t = base;
        t.tasks[0].end = 2000;
        CHECK(has_error(validate(t), codes::out_of_range_timestamp));
    }
    SUBCASE("empty task interval") {
        Trace t = base;
        t.tasks[0].end = t.tasks[0].start;
        CHECK(has_error(validate(t), codes::empty_interval));
    }
    SUBCASE("inverted trace bounds") {
        Trace t = base;
        t.trace_end = t.trace_start;
        CHECK(has_error(validate(t), codes::bad_trace_bounds));
    }
    SUBCASE("span times cpus overflowing 64 bits") {
        Trace t;
        t.num_cpus = 16;
        t.trace_start = 0;
        t.trace_end = INT64_MAX / 4;
        CHECK(has_error(validate(t), codes::span_overflow));
    }
    SUBCASE("samples for an undefined counter") {
        Trace t = base;
        t.series = build_series({{42, 0, 5, 1}});
        CHECK(has_error(validate(t), codes::unknown_counter));
    }
}

TEST_CASE("uncovered task is a warning, not an error") {
    Trace t = testing::small_trace();
    t.state_intervals[0].end = 300;  // task 0 runs [100, 500)
    ValidationReport report = validate(t);
    CHECK(!report.has_errors());
    CHECK(has_warning(report, codes::task_not_covered));
}

TEST_CASE("task_duration") {
    CHECK(task_duration({0, "w", 0, 100, 500}) == 400);
    CHECK(task_duration({0, "w", 0, 0, 1}) == 1);
}

TEST_CASE("state time never exceeds trace span per cpu") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        Trace t = testing::random_trace(rng);
        REQUIRE(!validate(t).has_errors());
        for (CpuId cpu = 0; cpu < t.num_cpus; ++cpu) {
            std::int64_t sum = 0;
            for (const auto& s : t.state_intervals)
                if (s.cpu == cpu)
                    sum += s.end - s.start;
            CHECK(sum <= t.trace_end - t.trace_start);
        }
    }
}
