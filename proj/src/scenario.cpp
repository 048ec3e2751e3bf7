#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

#include "cfs/dataset.hpp"
#include "cfs/errors.hpp"
#include "cfs/rng.hpp"

namespace cfs {

namespace {
// Decimal fractions like 0.1 are not exact in binary; 0.1 * 30 evaluates to
// 3.0000000000000004, which must still round to 3 in both directions.
constexpr double kRoundingSlack = 1e-9;

void check_fraction(double f, const char* name) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}
}  // namespace

std::size_t initial_class_count(double fraction, std::size_t classes) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(classes) + kRoundingSlack));
}

std::size_t increment_class_count(double fraction, std::size_t classes) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(classes) - kRoundingSlack));
}

std::vector<std::size_t> ScenarioSchedule::class_counts() const {
    std::vector<std::size_t> counts{initial_classes.size()};
    for (const auto& p : periods) counts.push_back(p.size());
    return counts;
}

ScenarioSchedule make_scenario(const Dataset& data, double init_fraction, double inc_fraction, std::uint64_t seed,
                               ClassOrder order) {
    if (!data.labeled()) throw std::invalid_argument("make_scenario: dataset has no labels");
    check_fraction(init_fraction, "init_fraction");
    check_fraction(inc_fraction, "inc_fraction");

    ScenarioSchedule s;
    s.init_fraction = init_fraction;
    s.inc_fraction = inc_fraction;
    s.seed = seed;

    if (order == ClassOrder::Shuffled) {
        s.class_order = data.class_ids();
        Rng rng(seed);
        rng.shuffle(std::span<LabelId>(s.class_order));
    } else {
        std::set<LabelId> seen;
        for (LabelId l : *data.labels) {
            if (seen.insert(l).second) s.class_order.push_back(l);
        }
    }

    const std::size_t total = s.class_order.size();
    const std::size_t initial = initial_class_count(init_fraction, total);
    if (initial == 0) {
        throw std::invalid_argument("make_scenario: floor(" + std::to_string(init_fraction) + " * " +
                                    std::to_string(total) + ") = 0 initial classes");
    }
    const std::size_t step = std::max<std::size_t>(1, increment_class_count(inc_fraction, total));

    s.initial_classes.assign(s.class_order.begin(), s.class_order.begin() + static_cast<std::ptrdiff_t>(initial));
    for (std::size_t i = initial; i < total; i += step) {
        const std::size_t end = std::min(total, i + step);
        s.periods.emplace_back(s.class_order.begin() + static_cast<std::ptrdiff_t>(i),
                               s.class_order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return s;
}

std::string scenario_to_json(const ScenarioSchedule& s) {
    nlohmann::json j;
    j["version"] = ScenarioSchedule::kVersion;
    j["class_order"] = s.class_order;
    j["initial"] = s.initial_classes;
    j["periods"] = s.periods;
    j["init_fraction"] = s.init_fraction;
    j["inc_fraction"] = s.inc_fraction;
    j["seed"] = s.seed;
    return j.dump(2) + "\n";
}

ScenarioSchedule scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed scenario file: ") + e.what());
    }
    try {
        const int version = j.at("version").get<int>();
        if (version != ScenarioSchedule::kVersion) throw VersionMismatch(version, ScenarioSchedule::kVersion);
        ScenarioSchedule s;
        s.class_order = j.at("class_order").get<std::vector<LabelId>>();
        s.initial_classes = j.at("initial").get<std::vector<LabelId>>();
        s.periods = j.at("periods").get<std::vector<std::vector<LabelId>>>();
        s.init_fraction = j.at("init_fraction").get<double>();
        s.inc_fraction = j.at("inc_fraction").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed scenario file: ") + e.what());
    }
}

ScenarioSplit split_periods(const Dataset& data, const ScenarioSchedule& schedule) {
    if (!data.labeled()) throw std::invalid_argument("split_periods: dataset has no labels");

    // class -> output slot (0 = initial, t = period t)
    std::map<LabelId, std::size_t> slot;
    auto assign = [&](const std::vector<LabelId>& classes, std::size_t where) {
        for (LabelId c : classes) {
            if (!slot.emplace(c, where).second) {
                throw DataError("schedule/class mismatch: class " + std::to_string(c) + " scheduled twice");
            }
        }
    };
    assign(schedule.initial_classes, 0);
    for (std::size_t t = 0; t < schedule.periods.size(); ++t) assign(schedule.periods[t], t + 1);

    const auto present = data.class_ids();
    if (present.size() != slot.size() ||
        !std::all_of(present.begin(), present.end(), [&](LabelId c) { return slot.count(c) == 1; })) {
        throw DataError("schedule/class mismatch: scheduled classes differ from the dataset's classes");
    }

    std::vector<std::vector<std::size_t>> rows(schedule.periods.size() + 1);
    for (std::size_t r = 0; r < data.size(); ++r) rows[slot.at((*data.labels)[r])].push_back(r);

    ScenarioSplit split;
    split.initial = data.subset(rows[0]);
    split.initial_rows = rows[0];
    for (std::size_t t = 1; t < rows.size(); ++t) {
        StreamBatch batch;
        batch.data = data.subset(rows[t]);
        batch.truth = std::move(*batch.data.labels);
        batch.data.labels.reset();
        batch.source_rows = rows[t];
        split.streams.push_back(std::move(batch));
    }
    return split;
}

}  // namespace cfs
