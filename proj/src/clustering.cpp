#include "cfs/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

#include "cfs/rng.hpp"

namespace cfs {

double squared_euclidean(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        s += diff * diff;
    }
    return s;
}

double euclidean(std::span<const double> x, std::span<const double> y) { return std::sqrt(squared_euclidean(x, y)); }

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kNoise) out[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    return out;
}

std::size_t distinct_rows(const Matrix& points, std::size_t cap) {
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < points.rows() && reps.size() < cap; ++i) {
        const auto r = points.row(i);
        const bool seen = std::any_of(reps.begin(), reps.end(), [&](std::size_t j) {
            const auto q = points.row(j);
            return std::equal(r.begin(), r.end(), q.begin());
        });
        if (!seen) reps.push_back(i);
    }
    return reps.size();
}

namespace {

// Farthest-point traversal from a seeded anchor inside the bounding box. The
// choice depends only on coordinates, so permuting the rows permutes the
// result.
Matrix farthest_point_centers(const Matrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], points(i, c));
            hi[c] = std::max(hi[c], points(i, c));
        }
    }
    Rng rng(seed);
    std::vector<double> anchor(d);
    for (std::size_t c = 0; c < d; ++c) anchor[c] = lo[c] + rng.uniform() * (hi[c] - lo[c]);

    Matrix centers;
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_euclidean(points.row(i), anchor);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (nearest[i] > nearest[best]) best = i;
        }
        centers.append_row(points.row(best));
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = squared_euclidean(points.row(i), points.row(best));
            nearest[i] = c == 0 ? dist : std::min(nearest[i], dist);
        }
    }
    return centers;
}

std::size_t nearest_center(std::span<const double> p, const Matrix& centers, double& best_dist) {
    std::size_t best = 0;
    best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const double dist = squared_euclidean(p, centers.row(c));
        if (dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    return best;
}

Matrix compute_centroids(const Matrix& points, const std::vector<int>& labels, std::size_t k,
                         const Matrix& previous) {
    Matrix centroids(k, points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        auto dst = centroids.row(c);
        const auto src = points.row(i);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
        ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
        auto dst = centroids.row(c);
        if (counts[c] == 0) {
            const auto prev = previous.row(c);
            std::copy(prev.begin(), prev.end(), dst.begin());
            continue;
        }
        for (auto& v : dst) v /= static_cast<double>(counts[c]);
    }
    return centroids;
}

// Moves the point farthest from its own centroid into each empty cluster.
void repair_empty_clusters(const Matrix& points, std::vector<int>& labels, Matrix& centroids) {
    const std::size_t k = centroids.rows();
    for (;;) {
        std::vector<std::size_t> counts(k, 0);
        for (int l : labels) ++counts[static_cast<std::size_t>(l)];
        const auto empty = std::find(counts.begin(), counts.end(), 0);
        if (empty == counts.end()) return;

        std::size_t donor = points.rows();
        double worst = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            if (counts[c] < 2) continue;
            const double dist = squared_euclidean(points.row(i), centroids.row(c));
            if (dist > worst) {
                worst = dist;
                donor = i;
            }
        }
        if (donor == points.rows()) return;
        const auto target = static_cast<std::size_t>(empty - counts.begin());
        labels[donor] = static_cast<int>(target);
        centroids = compute_centroids(points, labels, k, centroids);
    }
}

double within_sse(const Matrix& points, const std::vector<int>& labels, const Matrix& centroids) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        s += squared_euclidean(points.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
    }
    return s;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, std::size_t k, const KMeansOptions& options) {
    if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
    if (options.max_iter == 0) throw std::invalid_argument("kmeans: max_iter must be positive");
    if (distinct_rows(points, k) < k) {
        throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " exceeds the number of distinct points");
    }
    Matrix centers;
    if (options.seeds) {
        if (options.seeds->rows() != k || options.seeds->cols() != points.cols()) {
            throw std::invalid_argument("kmeans: seeds must be k x d");
        }
        centers = *options.seeds;
    } else {
        centers = farthest_point_centers(points, k, options.seed);
    }

    const std::size_t n = points.rows();
    ClusterAssignment out;
    out.k = k;
    out.labels.assign(n, -1);
    std::vector<int> next(n);
    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) next[i] = static_cast<int>(nearest_center(points.row(i), centers, dist));
        repair_empty_clusters(points, next, centers);
        ++out.iterations;
        if (next == out.labels) break;
        out.labels = next;
        centers = compute_centroids(points, out.labels, k, centers);
        out.sse_trace.push_back(within_sse(points, out.labels, centers));
    }
    out.centroids = std::move(centers);
    return out;
}

std::vector<bool> dbscan_core_points(const Matrix& points, double eps, std::size_t min_pts) {
    const std::size_t n = points.rows();
    const double eps2 = eps * eps;
    std::vector<std::size_t> counts(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (squared_euclidean(points.row(i), points.row(j)) <= eps2) {
                ++counts[i];
                ++counts[j];
            }
        }
    }
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = counts[i] >= min_pts;
    return core;
}

ClusterAssignment dbscan(const Matrix& points, double eps, std::size_t min_pts) {
    if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be positive");
    if (min_pts == 0) throw std::invalid_argument("dbscan: min_pts must be at least 1");

    const std::size_t n = points.rows();
    const double eps2 = eps * eps;
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i) {
        neighbours[i].push_back(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (squared_euclidean(points.row(i), points.row(j)) <= eps2) {
                neighbours[i].push_back(j);
                neighbours[j].push_back(i);
            }
        }
    }
    for (auto& nb : neighbours) std::sort(nb.begin(), nb.end());

    ClusterAssignment out;
    out.labels.assign(n, ClusterAssignment::kNoise);
    std::vector<bool> visited(n, false);
    int cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (visited[i] || neighbours[i].size() < min_pts) continue;
        std::deque<std::size_t> frontier{i};
        visited[i] = true;
        out.labels[i] = cluster;
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop_front();
            if (neighbours[p].size() < min_pts) continue;  // border point: no expansion
            for (std::size_t q : neighbours[p]) {
                if (out.labels[q] == ClusterAssignment::kNoise) out.labels[q] = cluster;
                if (!visited[q]) {
                    visited[q] = true;
                    frontier.push_back(q);
                }
            }
        }
        ++cluster;
    }
    out.k = static_cast<std::size_t>(cluster);
    return out;
}

}  // namespace cfs
