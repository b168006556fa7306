#include "tpan/synth_gen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "tpan/prng.hpp"

namespace tpan {

using nlohmann::json;

namespace {

[[noreturn]] void bad_spec(const std::string& what) {
    throw SynthError(SynthError::Code::BadSpec, "invalid synth spec: " + what);
}

void check_spec(const SynthSpec& spec) {
    if (spec.num_cpus == 0)
        bad_spec("num_cpus must be positive");
    if (spec.duration <= 0)
        bad_spec("duration must be positive");
    if (spec.state_period <= 0)
        bad_spec("state_period must be positive");
    double fracs[4] = {spec.f_exec, spec.f_create, spec.f_steal, spec.f_other};
    double sum = 0;
    for (double f : fracs) {
        // tolerate tiny negative values from computing a remainder in doubles
        if (f < -1e-9)
            bad_spec("state fractions must be non-negative");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        bad_spec("state fractions must sum to 1");
    for (const auto& plan : spec.tasks) {
        if (plan.count <= 0)
            bad_spec("task count must be positive");
        if (plan.task_type.empty())
            bad_spec("task_type must be non-empty");
        if (plan.noise_std < 0)
            bad_spec("noise_std must be non-negative");
    }
    if (!spec.indicators.empty() && spec.sampling_period <= 0)
        bad_spec("sampling_period must be positive when indicators are planted");
    std::set<std::string> names;
    for (const auto& ind : spec.indicators) {
        if (ind.name.empty() || !names.insert(ind.name).second)
            bad_spec("indicator names must be unique and non-empty");
        if (ind.kind == SynthIndicatorPlan::Kind::Ratio) {
            if (ind.counter.empty() || ind.denominator.empty() || ind.counter == ind.denominator)
                bad_spec("ratio indicator '" + ind.name + "' needs distinct counters");
            if ((ind.denominator_delta > 0) == (ind.denominator_rate > 0))
                bad_spec("ratio indicator '" + ind.name +
                         "' needs exactly one of denominator_delta / denominator_rate");
        } else if (ind.counter.empty()) {
            bad_spec("indicator '" + ind.name + "' needs a counter name");
        }
        if (!(ind.lo <= ind.hi))
            bad_spec("indicator '" + ind.name + "' has lo > hi");
    }
    for (const auto& plan : spec.tasks)
        for (const auto& term : plan.terms) {
            if (!(term.lo <= term.hi))
                bad_spec("term for '" + term.indicator + "' has lo > hi");
            bool known = false;
            for (const auto& ind : spec.indicators)
                if (ind.name == term.indicator)
                    known = true;
            if (!known)
                bad_spec("term references unknown indicator '" + term.indicator + "'");
        }
}

struct Segment {
    Timestamp start;
    Timestamp end;
};

// Per-CPU bump allocator over the execution-state segments.
struct ExecCursor {
    std::vector<Segment> segments;
    std::size_t seg = 0;
    Timestamp pos = 0;

    bool find_slot(std::int64_t dur, std::size_t& out_seg, Timestamp& out_pos) const {
        std::size_t j = seg;
        Timestamp p = pos;
        while (j < segments.size()) {
            if (p + dur <= segments[j].end) {
                out_seg = j;
                out_pos = p;
                return true;
            }
            ++j;
            if (j < segments.size())
                p = segments[j].start;
        }
        return false;
    }

    void commit(std::size_t j, Timestamp p, std::int64_t dur) {
        seg = j;
        pos = p + dur;
    }
};

}  // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        bad_spec("malformed JSON");
    SynthSpec spec;
    spec.num_cpus = doc.value("num_cpus", 1u);
    spec.duration = doc.value("duration", std::int64_t{0});
    spec.state_period = doc.value("state_period", spec.duration);
    if (doc.contains("fractions")) {
        const auto& f = doc.at("fractions");
        spec.f_exec = f.value("exec", 1.0);
        spec.f_create = f.value("create", 0.0);
        spec.f_steal = f.value("steal", 0.0);
        spec.f_other = f.value("other", 0.0);
    }
    for (const auto& t : doc.value("tasks", json::array())) {
        SynthTaskPlan plan;
        plan.task_type = t.value("task_type", std::string{});
        plan.count = t.value("count", std::int64_t{0});
        plan.beta = t.value("beta", 0.0);
        plan.noise_std = t.value("noise_std", 0.0);
        for (const auto& term : t.value("terms", json::array())) {
            SynthTerm st;
            st.indicator = term.value("indicator", std::string{});
            st.alpha = term.value("alpha", 0.0);
            st.lo = term.value("lo", 0.0);
            st.hi = term.value("hi", 0.0);
            plan.terms.push_back(std::move(st));
        }
        spec.tasks.push_back(std::move(plan));
    }
    if (doc.contains("counters")) {
        const auto& c = doc.at("counters");
        spec.sampling_period = c.value("sampling_period", std::int64_t{0});
        spec.boundary_samples = c.value("boundary_samples", true);
        for (const auto& ind : c.value("indicators", json::array())) {
            SynthIndicatorPlan plan;
            plan.name = ind.value("name", std::string{});
            std::string kind = ind.value("kind", std::string{"delta"});
            if (kind == "delta")
                plan.kind = SynthIndicatorPlan::Kind::RawDelta;
            else if (kind == "ratio")
                plan.kind = SynthIndicatorPlan::Kind::Ratio;
            else if (kind == "rate")
                plan.kind = SynthIndicatorPlan::Kind::TimeRate;
            else
                bad_spec("unknown indicator kind '" + kind + "'");
            if (plan.kind == SynthIndicatorPlan::Kind::Ratio) {
                plan.counter = ind.value("numerator", std::string{});
                plan.denominator = ind.value("denominator", std::string{});
                plan.denominator_delta = ind.value("denominator_delta", 0.0);
                plan.denominator_rate = ind.value("denominator_rate", 0.0);
            } else {
                plan.counter = ind.value("counter", std::string{});
            }
            plan.lo = ind.value("lo", 0.0);
            plan.hi = ind.value("hi", 1.0);
            spec.indicators.push_back(std::move(plan));
        }
    }
    check_spec(spec);
    return spec;
}

SynthResult generate(const SynthSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    SynthResult result;
    result.seed = seed;
    Trace& trace = result.trace;
    trace.num_cpus = spec.num_cpus;
    trace.trace_start = 0;
    trace.trace_end = spec.duration;

    // State schedule: one repeating cycle per CPU, fractions realized by
    // cumulative rounding so each cycle tiles the period exactly.
    const std::int64_t period = spec.state_period;
    const double cum[4] = {spec.f_exec, spec.f_exec + spec.f_create,
                           spec.f_exec + spec.f_create + spec.f_steal, 1.0};
    const StateKind kinds[4] = {StateKind::task_execution(), StateKind::task_creation(),
                                StateKind::work_stealing(), StateKind::other("other")};
    std::vector<ExecCursor> cursors(spec.num_cpus);
    for (CpuId cpu = 0; cpu < spec.num_cpus; ++cpu) {
        for (Timestamp base = 0; base < spec.duration; base += period) {
            Timestamp prev = base;
            for (int k = 0; k < 4; ++k) {
                Timestamp bound = base + round_ticks(static_cast<double>(period) * cum[k]);
                bound = std::min(bound, spec.duration);
                if (bound > prev) {
                    trace.state_intervals.push_back({cpu, kinds[k], prev, bound});
                    if (k == 0)
                        cursors[cpu].segments.push_back({prev, bound});
                }
                prev = std::max(prev, bound);
            }
        }
        if (!cursors[cpu].segments.empty())
            cursors[cpu].pos = cursors[cpu].segments.front().start;
    }

    // Counter id assignment in order of first mention across indicator plans.
    std::map<std::string, CounterId> counter_ids;
    auto counter_id = [&](const std::string& name) {
        auto it = counter_ids.find(name);
        if (it != counter_ids.end())
            return it->second;
        CounterId id = static_cast<CounterId>(trace.counters.size());
        counter_ids.emplace(name, id);
        trace.counters.push_back({id, name});
        return id;
    };
    for (const auto& ind : spec.indicators) {
        counter_id(ind.counter);
        if (ind.kind == SynthIndicatorPlan::Kind::Ratio)
            counter_id(ind.denominator);
    }

    Pcg32 rng(seed);
    // Per (counter, cpu): tasks in placement order with their planted deltas.
    struct TaskDelta {
        Timestamp start;
        Timestamp end;
        std::int64_t delta;
    };
    std::map<SeriesKey, std::vector<TaskDelta>> deltas;

    TaskId next_id = 0;
    std::int64_t rr = 0;  // round-robin CPU choice
    for (const auto& plan : spec.tasks) {
        for (std::int64_t i = 0; i < plan.count; ++i, ++rr) {
            // Draw order is part of the format: model terms, noise, then
            // independent indicator values in plan order.
            double model = plan.beta;
            std::map<std::string, double> drawn;
            for (const auto& term : plan.terms) {
                double x = rng.uniform(term.lo, term.hi);
                drawn[term.indicator] = x;
                model += term.alpha * x;
            }
            if (plan.noise_std > 0)
                model += plan.noise_std * rng.gaussian();
            for (const auto& ind : spec.indicators)
                if (!drawn.count(ind.name))
                    drawn[ind.name] = rng.uniform(ind.lo, ind.hi);

            std::int64_t duration = std::max<std::int64_t>(1, round_ticks(model));

            CpuId cpu = 0;
            std::size_t slot_seg = 0;
            Timestamp slot_pos = 0;
            bool placed = false;
            for (std::uint32_t attempt = 0; attempt < spec.num_cpus; ++attempt) {
                CpuId candidate = static_cast<CpuId>((rr + attempt) % spec.num_cpus);
                if (cursors[candidate].find_slot(duration, slot_seg, slot_pos)) {
                    cpu = candidate;
                    placed = true;
                    break;
                }
            }
            if (!placed)
                throw SynthError(SynthError::Code::Infeasible,
                                 "task of duration " + std::to_string(duration) +
                                     " does not fit in any CPU's execution-state budget");
            cursors[cpu].commit(slot_seg, slot_pos, duration);

            TaskInstance task{next_id++, plan.task_type, cpu, slot_pos, slot_pos + duration};
            PlantedTask planted{task.id, task.task_type, cpu, task.start, duration, {}};

            for (const auto& ind : spec.indicators) {
                double x = drawn.at(ind.name);
                double realized = x;
                switch (ind.kind) {
                    case SynthIndicatorPlan::Kind::RawDelta: {
                        std::int64_t n = std::max<std::int64_t>(0, round_ticks(x));
                        deltas[{counter_ids.at(ind.counter), cpu}].push_back(
                            {task.start, task.end, n});
                        realized = static_cast<double>(n);
                        break;
                    }
                    case SynthIndicatorPlan::Kind::TimeRate: {
                        std::int64_t n = std::max<std::int64_t>(
                            0, round_ticks(x * static_cast<double>(duration)));
                        deltas[{counter_ids.at(ind.counter), cpu}].push_back(
                            {task.start, task.end, n});
                        realized = static_cast<double>(n) / static_cast<double>(duration);
                        break;
                    }
                    case SynthIndicatorPlan::Kind::Ratio: {
                        std::int64_t den =
                            ind.denominator_delta > 0
                                ? round_ticks(ind.denominator_delta)
                                : round_ticks(ind.denominator_rate * static_cast<double>(duration));
                        den = std::max<std::int64_t>(1, den);
                        std::int64_t num =
                            std::max<std::int64_t>(0, round_ticks(x * static_cast<double>(den)));
                        deltas[{counter_ids.at(ind.counter), cpu}].push_back(
                            {task.start, task.end, num});
                        deltas[{counter_ids.at(ind.denominator), cpu}].push_back(
                            {task.start, task.end, den});
                        realized = static_cast<double>(num) / static_cast<double>(den);
                        break;
                    }
                }
                planted.indicator_values[ind.name] = realized;
            }

            trace.tasks.push_back(std::move(task));
            result.planted.push_back(std::move(planted));
        }
    }

    // Emit cumulative samples: a periodic grid plus (optionally) every task
    // boundary, so endpoint lookups for planted tasks are exact.
    if (!spec.indicators.empty()) {
        std::vector<CounterSample> samples;
        for (const auto& desc : trace.counters) {
            for (CpuId cpu = 0; cpu < spec.num_cpus; ++cpu) {
                auto it = deltas.find({desc.id, cpu});
                std::vector<TaskDelta> cpu_deltas =
                    it == deltas.end() ? std::vector<TaskDelta>{} : it->second;
                std::sort(cpu_deltas.begin(), cpu_deltas.end(),
                          [](const TaskDelta& a, const TaskDelta& b) { return a.start < b.start; });
                std::vector<std::int64_t> prefix(cpu_deltas.size() + 1, 0);
                for (std::size_t k = 0; k < cpu_deltas.size(); ++k)
                    prefix[k + 1] = prefix[k] + cpu_deltas[k].delta;

                auto value_at = [&](Timestamp t) -> std::int64_t {
                    // Number of tasks fully before or containing t.
                    std::size_t lo = 0, hi = cpu_deltas.size();
                    while (lo < hi) {
                        std::size_t mid = (lo + hi) / 2;
                        if (cpu_deltas[mid].start <= t)
                            lo = mid + 1;
                        else
                            hi = mid;
                    }
                    // lo = first task with start > t
                    std::int64_t v = 0;
                    if (lo > 0) {
                        const TaskDelta& d = cpu_deltas[lo - 1];
                        v = prefix[lo - 1];
                        if (t >= d.end) {
                            v += d.delta;
                        } else {
                            // linear growth inside the task, rounded half up
                            __int128 num = static_cast<__int128>(d.delta) * (t - d.start) * 2 +
                                           (d.end - d.start);
                            v += static_cast<std::int64_t>(num / (2 * (d.end - d.start)));
                        }
                    }
                    return v;
                };

                std::set<Timestamp> times;
                for (Timestamp t = 0; t <= spec.duration; t += spec.sampling_period)
                    times.insert(t);
                times.insert(spec.duration);
                if (spec.boundary_samples) {
                    for (const auto& d : cpu_deltas) {
                        times.insert(d.start);
                        times.insert(d.end);
                    }
                }
                for (Timestamp t : times)
                    samples.push_back({desc.id, cpu, t, value_at(t)});
            }
        }
        trace.series = build_series(std::move(samples));
    }

    return result;
}

std::string truth_to_json(const SynthResult& result) {
    nlohmann::ordered_json doc;
    doc["seed"] = result.seed;
    auto tasks = nlohmann::ordered_json::array();
    for (const auto& p : result.planted) {
        nlohmann::ordered_json row;
        row["id"] = p.id;
        row["task_type"] = p.task_type;
        row["cpu"] = p.cpu;
        row["start"] = p.start;
        row["duration"] = p.duration;
        nlohmann::ordered_json inds;
        for (const auto& [name, value] : p.indicator_values)
            inds[name] = value;
        row["indicators"] = std::move(inds);
        tasks.push_back(std::move(row));
    }
    doc["tasks"] = std::move(tasks);
    return doc.dump(2) + "\n";
}

}  // namespace tpan
