#include "cfs/rough_set.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace cfs {

PositiveRegionStat positive_region(const std::vector<GranularBall>& balls, double purity_threshold) {
    PositiveRegionStat stat;
    stat.threshold_used = purity_threshold;
    for (const auto& b : balls) {
        const bool qualifies = b.residue ? b.majority_count == b.size() : meets_purity(b, purity_threshold);
        if (!qualifies) continue;
        ++stat.qualifying_balls;
        stat.covered_instances += b.size();
    }
    return stat;
}

RedundancyResult is_redundant(const Matrix& store, std::span<const LabelId> labels, const FeatureSubset& working,
                              std::size_t candidate, double purity_threshold, const PositiveRegionStat& baseline,
                              std::uint64_t seed) {
    if (!working.contains(candidate)) throw std::invalid_argument("is_redundant: candidate not in working set");
    if (working.size() < 2) throw std::invalid_argument("is_redundant: cannot test the last remaining feature");

    GenerationOptions gen;
    gen.purity_threshold = purity_threshold;
    gen.seed = seed;
    const auto balls = generate_balls(store, labels, working.without(candidate), gen);
    RedundancyResult r;
    r.trial = positive_region(balls, kRegionPurity);
    r.redundant = r.trial.covered_instances >= baseline.covered_instances;
    return r;
}

SelectionResult select_features_initial(const Matrix& store, std::span<const LabelId> labels, double purity_threshold,
                                        std::uint64_t seed) {
    if (store.rows() == 0) throw std::invalid_argument("select_features_initial: empty data");
    if (store.cols() == 0) throw std::invalid_argument("select_features_initial: no features");

    GenerationOptions gen;
    gen.purity_threshold = purity_threshold;
    gen.seed = seed;
    SelectionResult out;
    out.subset = FeatureSubset::all(store.cols());
    auto baseline = positive_region(generate_balls(store, labels, out.subset, gen), kRegionPurity);

    for (std::size_t a = 0; a < store.cols(); ++a) {
        if (out.subset.size() < 2) break;
        const auto r = is_redundant(store, labels, out.subset, a, purity_threshold, baseline, seed);
        out.audit.push_back({a, r.redundant, baseline, r.trial});
        if (r.redundant) {
            out.subset = out.subset.without(a);
            baseline = r.trial;
        }
    }
    return out;
}

std::string audit_to_json(const std::vector<FeatureDecision>& audit) {
    auto stat = [](const PositiveRegionStat& s) {
        return nlohmann::json{{"covered_instances", s.covered_instances},
                              {"qualifying_balls", s.qualifying_balls},
                              {"threshold", s.threshold_used}};
    };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : audit) {
        arr.push_back({{"feature", d.feature},
                       {"decision", d.removed ? "removed" : "kept"},
                       {"baseline", stat(d.baseline)},
                       {"trial", stat(d.trial)}});
    }
    return arr.dump(2);
}

}  // namespace cfs
