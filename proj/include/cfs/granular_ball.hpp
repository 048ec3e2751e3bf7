#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfs/feature_subset.hpp"
#include "cfs/matrix.hpp"

namespace cfs {

// A hypersphere covering a set of instances. Geometry (center, radius) lives in
// `subspace`; members index rows of a backing instance store with all d
// features.
struct GranularBall {
    std::vector<double> center;
    double radius = 0.0;
    std::vector<std::size_t> members;  // strictly increasing
    LabelId label = 0;
    // Members carrying `label`. purity() derives from it so insertions stay exact.
    std::size_t majority_count = 0;
    FeatureSubset subspace;
    // Coincident points that 2-means could not separate; kept below the purity threshold.
    bool residue = false;

    double purity() const {
        return members.empty() ? 0.0 : static_cast<double>(majority_count) / static_cast<double>(members.size());
    }
    std::size_t size() const { return members.size(); }

    // Distance from a full-dimensional point to the center, measured in the subspace.
    double distance_to(std::span<const double> point) const;
    bool contains(std::span<const double> point) const { return distance_to(point) <= radius; }

    bool operator==(const GranularBall&) const = default;
};

struct BallSetStats {
    std::size_t ball_count = 0;
    std::size_t coverage = 0;
    double mean_purity = 0.0;
    std::size_t residue_count = 0;

    // Diagnostic stand-in for the information-loss term of the ball objective.
    double loss() const { return 1.0 - mean_purity; }
};

// purity >= threshold, compared in member counts with a small slack so that
// decimal thresholds (0.65 of 20 members) behave as written.
bool meets_purity(const GranularBall& ball, double threshold);

BallSetStats ball_set_stats(const std::vector<GranularBall>& balls);

// Center is the member mean, radius the largest member distance, label the
// majority label (ties to the lowest label-id).
GranularBall ball_from_members(const Matrix& store, std::span<const std::size_t> members,
                               const FeatureSubset& subspace, std::span<const LabelId> labels);

struct GenerationOptions {
    double purity_threshold = 1.0;
    std::uint64_t seed = 0;
    std::size_t max_iter = 100;
};

// Class-seeded k-means, then repeated 2-means splits of every ball whose purity
// is below the threshold. The result partitions the store's rows and is sorted
// by lowest member index.
std::vector<GranularBall> generate_balls(const Matrix& store, std::span<const LabelId> labels,
                                         const FeatureSubset& subspace, const GenerationOptions& options);

// Adds a contained instance without moving the center or radius. The new
// member is counted as bearing the ball's label.
GranularBall insert_known(const GranularBall& ball, std::size_t instance_index, const Matrix& store);

}  // namespace cfs
