#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "tpan/counter_attr.hpp"
#include "tpan/regression.hpp"
#include "tpan/state_analysis.hpp"
#include "tpan/synth_gen.hpp"
#include "tpan/trace_io.hpp"

namespace {

tpan::SynthSpec bench_spec(std::int64_t duration) {
    tpan::SynthSpec spec;
    spec.num_cpus = 8;
    spec.duration = duration;
    spec.state_period = 1000;
    spec.f_exec = 0.9;
    spec.f_create = 0.04;
    spec.f_steal = 0.04;
    spec.f_other = 0.02;
    tpan::SynthTaskPlan plan;
    plan.task_type = "work";
    plan.count = duration / 400;
    plan.beta = 50;
    plan.terms.push_back({"miss_rate", 100.0, 0.0, 0.5});
    spec.tasks.push_back(plan);
    tpan::SynthIndicatorPlan ind;
    ind.name = "miss_rate";
    ind.kind = tpan::SynthIndicatorPlan::Kind::Ratio;
    ind.counter = "cache_misses";
    ind.denominator = "cache_accesses";
    ind.denominator_delta = 1e6;
    spec.indicators.push_back(ind);
    spec.sampling_period = 500;
    spec.boundary_samples = true;
    return spec;
}

void bm_aggregate_states(benchmark::State& state) {
    tpan::SynthResult result = tpan::generate(bench_spec(state.range(0)), 1);
    for (auto _ : state) {
        auto agg = tpan::aggregate_states(result.trace,
                                          {result.trace.trace_start, result.trace.trace_end});
        benchmark::DoNotOptimize(agg);
    }
}
BENCHMARK(bm_aggregate_states)->Arg(100000)->Arg(1000000);

void bm_build_table(benchmark::State& state) {
    tpan::SynthResult result = tpan::generate(bench_spec(state.range(0)), 1);
    auto defs = tpan::default_indicators(result.trace);
    for (auto _ : state) {
        auto table = tpan::build_table(result.trace, defs);
        benchmark::DoNotOptimize(table);
    }
}
BENCHMARK(bm_build_table)->Arg(100000)->Arg(1000000);

void bm_fit_linear(benchmark::State& state) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> xd(0.0, 1.0);
    std::vector<std::pair<double, double>> pts;
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        double x = xd(rng);
        pts.emplace_back(x, 3.0 * x + xd(rng));
    }
    for (auto _ : state) {
        auto fit = tpan::fit_linear(pts);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(bm_fit_linear)->Arg(1000)->Arg(100000);

void bm_parse_trace(benchmark::State& state) {
    tpan::SynthResult result = tpan::generate(bench_spec(state.range(0)), 1);
    std::string bytes = tpan::serialize_trace(result.trace);
    for (auto _ : state) {
        std::istringstream in(bytes);
        auto parsed = tpan::parse_trace(in);
        benchmark::DoNotOptimize(parsed);
    }
}
BENCHMARK(bm_parse_trace)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
