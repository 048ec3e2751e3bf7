#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfs/feature_subset.hpp"
#include "cfs/matrix.hpp"

namespace cfs {

double euclidean(std::span<const double> x, std::span<const double> y);
double squared_euclidean(std::span<const double> x, std::span<const double> y);

struct ClusterAssignment {
    static constexpr int kNoise = -1;

    std::vector<int> labels;  // cluster id per point, or kNoise
    std::optional<Matrix> centroids;
    std::size_t k = 0;

    // k-means only: within-cluster SSE after each assignment step.
    std::vector<double> sse_trace;
    std::size_t iterations = 0;

    std::vector<std::vector<std::size_t>> members() const;
};

struct KMeansOptions {
    std::optional<Matrix> seeds;  // k x d initial centers
    std::size_t max_iter = 100;
    std::uint64_t seed = 0;
};

// Number of distinct rows, counting at most `cap` of them.
std::size_t distinct_rows(const Matrix& points, std::size_t cap);

// Lloyd's k-means. Without explicit seeds the centers are chosen by seeded
// farthest-point traversal. Empty clusters are refilled with the point lying
// farthest from its own centroid. Nearest-center ties go to the lowest index.
ClusterAssignment kmeans(const Matrix& points, std::size_t k, const KMeansOptions& options = {});

// Closed eps-ball neighbourhoods; a point is core when its neighbourhood,
// itself included, holds at least min_pts points.
ClusterAssignment dbscan(const Matrix& points, double eps, std::size_t min_pts);

// Core-point flags under the same rule, exposed for testing.
std::vector<bool> dbscan_core_points(const Matrix& points, double eps, std::size_t min_pts);

}  // namespace cfs
