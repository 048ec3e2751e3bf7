#include <algorithm>
#include <cstring>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "cfs/eval.hpp"
#include "cfs/stopwatch.hpp"

namespace cfs {

namespace {

class Fnv1a {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= b[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    template <class T>
    void value(const T& v) {
        bytes(&v, sizeof v);
    }
    std::uint64_t digest() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// The labelled data a from-scratch selector sees at each period.
std::vector<Dataset> revealed_prefixes(const ScenarioSplit& split) {
    std::vector<Dataset> out{split.initial};
    Dataset acc = split.initial;
    for (const auto& batch : split.streams) {
        for (std::size_t i = 0; i < batch.data.size(); ++i) {
            acc.instances.append_row(batch.data.instances.row(i));
            acc.labels->push_back(batch.truth[i]);
        }
        out.push_back(acc);
    }
    return out;
}

}  // namespace

std::uint64_t bench_config_hash(const Dataset& data, const ScenarioSchedule& schedule, const BenchParams& params) {
    Fnv1a h;
    h.bytes(data.instances.data().data(), data.instances.data().size() * sizeof(double));
    if (data.labels) h.bytes(data.labels->data(), data.labels->size() * sizeof(LabelId));
    const auto sched = scenario_to_json(schedule);
    h.bytes(sched.data(), sched.size());
    h.value(params.purity_threshold);
    h.value(params.stream.eps);
    h.value(params.stream.min_pts);
    h.value(params.seed);
    return h.digest();
}

BenchResult bench_continual_vs_scratch(const Dataset& data, const ScenarioSchedule& schedule,
                                       const BenchParams& params) {
    if (schedule.periods.size() < 2) throw std::invalid_argument("bench: schedule needs at least 2 periods");
    if (params.repeats == 0) throw std::invalid_argument("bench: repeats must be positive");

    const ScenarioSplit split = split_periods(data, schedule);
    const auto prefixes = revealed_prefixes(split);
    const std::size_t slots = split.streams.size() + 1;

    BenchResult r;
    for (const auto& p : prefixes) r.revealed_instances.push_back(p.size());

    auto run_continual = [&](BenchResult* record) {
        const BenchParams used = params;
        std::vector<double> times;
        Stopwatch clock;
        KnowledgeBase kb = build_knowledge_base(split.initial, used.purity_threshold, used.seed);
        times.push_back(clock.lap_ms());
        std::vector<FeatureSubset> subsets{kb.selected};
        for (std::size_t t = 0; t < split.streams.size(); ++t) {
            auto outcome = process_period(std::move(kb), split.streams[t].data, used.stream, t + 1);
            times.push_back(clock.lap_ms());
            kb = std::move(outcome.kb);
            subsets.push_back(kb.selected);
        }
        if (record) {
            record->continual_runs.push_back(times);
            record->continual_subsets = subsets;
            record->continual_config_hash = bench_config_hash(data, schedule, used);
        }
    };
    auto run_scratch = [&](BenchResult* record) {
        const BenchParams used = params;
        std::vector<double> times;
        std::vector<FeatureSubset> subsets;
        for (const auto& prefix : prefixes) {
            Stopwatch clock;
            auto sel = select_features_initial(prefix.instances, *prefix.labels, used.purity_threshold, used.seed);
            times.push_back(clock.lap_ms());
            subsets.push_back(sel.subset);
        }
        if (record) {
            record->scratch_runs.push_back(times);
            record->scratch_subsets = subsets;
            record->scratch_config_hash = bench_config_hash(data, schedule, used);
        }
    };

    if (params.warmup) {
        run_continual(nullptr);
        run_scratch(nullptr);
    }
    for (std::size_t rep = 0; rep < params.repeats; ++rep) {
        run_continual(&r);
        run_scratch(&r);
    }

    double sum_c = 0.0, sum_s = 0.0;
    for (std::size_t t = 0; t < slots; ++t) {
        std::vector<double> c, s;
        for (const auto& run : r.continual_runs) c.push_back(run[t]);
        for (const auto& run : r.scratch_runs) s.push_back(run[t]);
        r.per_period_continual_ms.push_back(median(c));
        r.per_period_scratch_ms.push_back(median(s));
        sum_c += r.per_period_continual_ms.back();
        sum_s += r.per_period_scratch_ms.back();
    }
    r.cumulative_speedup = sum_c > 0.0 ? sum_s / sum_c : 0.0;
    return r;
}

std::string bench_to_json(const BenchResult& r) {
    nlohmann::json j;
    j["per_period_continual_ms"] = r.per_period_continual_ms;
    j["per_period_scratch_ms"] = r.per_period_scratch_ms;
    j["revealed_instances"] = r.revealed_instances;
    j["cumulative_speedup"] = r.cumulative_speedup;
    j["continual_config_hash"] = r.continual_config_hash;
    j["scratch_config_hash"] = r.scratch_config_hash;
    auto subsets = [](const std::vector<FeatureSubset>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& s : v) a.push_back(s.indices());
        return a;
    };
    j["continual_subsets"] = subsets(r.continual_subsets);
    j["scratch_subsets"] = subsets(r.scratch_subsets);
    return j.dump();
}

}  // namespace cfs
