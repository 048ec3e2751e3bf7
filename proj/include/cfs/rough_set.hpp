#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfs/feature_subset.hpp"
#include "cfs/granular_ball.hpp"
#include "cfs/matrix.hpp"

namespace cfs {

// Size of the generation positive region, measured as the number of instances
// inside qualifying balls.
struct PositiveRegionStat {
    std::size_t covered_instances = 0;
    std::size_t qualifying_balls = 0;
    double threshold_used = 1.0;

    bool operator==(const PositiveRegionStat&) const = default;
};

// A ball qualifies when its purity reaches the threshold. Residue balls only
// qualify when fully pure.
PositiveRegionStat positive_region(const std::vector<GranularBall>& balls, double purity_threshold);

// Redundancy decisions only count single-class balls. The generation threshold T
// decides how far balls are split; a ball that stops at purity T < 1 is outside
// the region, which is what makes removing an informative feature visible.
inline constexpr double kRegionPurity = 1.0;

struct RedundancyResult {
    bool redundant = false;
    PositiveRegionStat trial;
};

// Rebuilds the balls at threshold T on working \ {candidate} and compares the
// kRegionPurity coverage with the baseline. Removing the candidate is allowed
// when coverage does not drop.
RedundancyResult is_redundant(const Matrix& store, std::span<const LabelId> labels, const FeatureSubset& working,
                              std::size_t candidate, double purity_threshold, const PositiveRegionStat& baseline,
                              std::uint64_t seed);

struct FeatureDecision {
    std::size_t feature = 0;
    bool removed = false;
    PositiveRegionStat baseline;
    PositiveRegionStat trial;
};

struct SelectionResult {
    FeatureSubset subset;
    std::vector<FeatureDecision> audit;
};

// Single-pass backward elimination in ascending feature order. The baseline is
// refreshed after every removal; the last remaining feature is never tested.
SelectionResult select_features_initial(const Matrix& store, std::span<const LabelId> labels, double purity_threshold,
                                        std::uint64_t seed);

std::string audit_to_json(const std::vector<FeatureDecision>& audit);

}  // namespace cfs
