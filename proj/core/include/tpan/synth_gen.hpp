#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpan/trace_model.hpp"

namespace tpan {

// One additive term of a planted duration model: duration picks up
// alpha * x where x ~ uniform[lo, hi] is the planted indicator value.
struct SynthTerm {
    std::string indicator;
    double alpha = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct SynthTaskPlan {
    std::string task_type;
    std::int64_t count = 0;
    double beta = 0.0;  // ticks
    std::vector<SynthTerm> terms;
    double noise_std = 0.0;  // Gaussian noise in ticks
};

// How an indicator is realized as counter deltas.
struct SynthIndicatorPlan {
    enum class Kind { RawDelta, Ratio, TimeRate };

    std::string name;
    Kind kind = Kind::RawDelta;
    std::string counter;      // RawDelta/TimeRate counter, or Ratio numerator
    std::string denominator;  // Ratio only
    // Ratio denominator delta per task: fixed, or per-tick rate (exactly one set).
    double denominator_delta = 0.0;
    double denominator_rate = 0.0;
    // Value distribution used when no duration-model term references this
    // indicator (an indicator planted independently of duration).
    double lo = 0.0;
    double hi = 1.0;
};

struct SynthSpec {
    std::uint32_t num_cpus = 1;
    std::int64_t duration = 0;
    std::int64_t state_period = 0;
    // Fractions of each state cycle, summing to 1.
    double f_exec = 1.0;
    double f_create = 0.0;
    double f_steal = 0.0;
    double f_other = 0.0;
    std::vector<SynthTaskPlan> tasks;
    std::int64_t sampling_period = 0;
    bool boundary_samples = true;
    std::vector<SynthIndicatorPlan> indicators;
};

class SynthError : public std::runtime_error {
public:
    enum class Code { BadSpec, Infeasible };
    SynthError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// Ground truth for one generated task, as the analyses should observe it.
struct PlantedTask {
    TaskId id = 0;
    std::string task_type;
    CpuId cpu = 0;
    Timestamp start = 0;
    std::int64_t duration = 0;
    std::map<std::string, double> indicator_values;
};

struct SynthResult {
    Trace trace;
    std::vector<PlantedTask> planted;
    std::uint64_t seed = 0;
};

SynthSpec parse_synth_spec(const std::string& json_text);

// Deterministic: identical (spec, seed) pairs yield byte-identical traces.
SynthResult generate(const SynthSpec& spec, std::uint64_t seed);

// Planted-truth ledger as a JSON document.
std::string truth_to_json(const SynthResult& result);

}  // namespace tpan
