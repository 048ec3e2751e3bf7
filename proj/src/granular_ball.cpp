#include "cfs/granular_ball.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cfs/clustering.hpp"

namespace cfs {

namespace {

// Purity comparison in counts, tolerant of decimal thresholds such as 0.65 * 20.
bool meets(std::size_t majority, std::size_t size, double threshold) {
    return static_cast<double>(majority) >= threshold * static_cast<double>(size) - 1e-9;
}

// Builds a ball from rows of `projected`, whose columns already are the subspace.
GranularBall make_ball(const Matrix& projected, std::vector<std::size_t> members, std::span<const LabelId> labels,
                       const FeatureSubset& subspace) {
    GranularBall ball;
    ball.subspace = subspace;
    ball.center.assign(projected.cols(), 0.0);
    for (auto i : members) {
        const auto row = projected.row(i);
        for (std::size_t c = 0; c < row.size(); ++c) ball.center[c] += row[c];
    }
    for (auto& v : ball.center) v /= static_cast<double>(members.size());
    for (auto i : members) ball.radius = std::max(ball.radius, euclidean(projected.row(i), ball.center));

    std::map<LabelId, std::size_t> counts;
    for (auto i : members) ++counts[labels[i]];
    for (const auto& [label, count] : counts) {
        if (count > ball.majority_count) {  // map order gives ties to the lowest id
            ball.majority_count = count;
            ball.label = label;
        }
    }
    ball.members = std::move(members);
    return ball;
}

std::vector<double> class_centroid(const Matrix& projected, std::span<const std::size_t> rows,
                                   std::span<const LabelId> labels, LabelId label) {
    std::vector<double> c(projected.cols(), 0.0);
    std::size_t count = 0;
    for (auto i : rows) {
        if (labels[i] != label) continue;
        const auto row = projected.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) c[j] += row[j];
        ++count;
    }
    for (auto& v : c) v /= static_cast<double>(count);
    return c;
}

// 2-means on an impure ball's members. Seeds are the centroids of its two most
// frequent labels; when those coincide the splitter falls back to farthest-point
// initialisation.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_two(const Matrix& projected,
                                                                        const std::vector<std::size_t>& members,
                                                                        std::span<const LabelId> labels,
                                                                        const GenerationOptions& options) {
    const Matrix local = projected.select_rows(members);
    std::map<LabelId, std::size_t> counts;
    for (auto i : members) ++counts[labels[i]];
    std::vector<std::pair<std::size_t, LabelId>> ranked;
    for (const auto& [label, count] : counts) ranked.emplace_back(count, label);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    KMeansOptions km;
    km.max_iter = options.max_iter;
    km.seed = options.seed;
    if (ranked.size() >= 2) {
        auto a = class_centroid(projected, members, labels, ranked[0].second);
        auto b = class_centroid(projected, members, labels, ranked[1].second);
        if (a != b) {
            Matrix seeds;
            seeds.append_row(a);
            seeds.append_row(b);
            km.seeds = std::move(seeds);
        }
    }
    const auto result = kmeans(local, 2, km);
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        (result.labels[i] == 0 ? out.first : out.second).push_back(members[i]);
    }
    return out;
}

}  // namespace

double GranularBall::distance_to(std::span<const double> point) const {
    double s = 0.0;
    std::size_t c = 0;
    for (auto f : subspace) {
        const double diff = point[f] - center[c++];
        s += diff * diff;
    }
    return std::sqrt(s);
}

bool meets_purity(const GranularBall& ball, double threshold) {
    return !ball.members.empty() && meets(ball.majority_count, ball.size(), threshold);
}

BallSetStats ball_set_stats(const std::vector<GranularBall>& balls) {
    BallSetStats stats;
    stats.ball_count = balls.size();
    double purity_sum = 0.0;
    for (const auto& b : balls) {
        stats.coverage += b.size();
        purity_sum += b.purity();
        if (b.residue) ++stats.residue_count;
    }
    stats.mean_purity = balls.empty() ? 0.0 : purity_sum / static_cast<double>(balls.size());
    return stats;
}

GranularBall ball_from_members(const Matrix& store, std::span<const std::size_t> members,
                               const FeatureSubset& subspace, std::span<const LabelId> labels) {
    if (members.empty()) throw std::invalid_argument("ball_from_members: empty member set");
    if (subspace.empty() || !subspace.fits(store.cols())) {
        throw std::invalid_argument("ball_from_members: subspace out of range");
    }
    if (labels.size() != store.rows()) throw std::invalid_argument("ball_from_members: label count mismatch");
    std::vector<std::size_t> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.back() >= store.rows()) throw std::invalid_argument("ball_from_members: member index out of range");

    // Project only the member rows; indices are remapped to the local copy and back.
    const Matrix local = store.select_rows(sorted).select_cols(subspace.indices());
    std::vector<LabelId> local_labels;
    local_labels.reserve(sorted.size());
    for (auto i : sorted) local_labels.push_back(labels[i]);
    std::vector<std::size_t> local_members(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) local_members[i] = i;
    GranularBall ball = make_ball(local, std::move(local_members), local_labels, subspace);
    ball.members = std::move(sorted);
    return ball;
}

std::vector<GranularBall> generate_balls(const Matrix& store, std::span<const LabelId> labels,
                                         const FeatureSubset& subspace, const GenerationOptions& options) {
    if (store.rows() == 0) throw std::invalid_argument("generate_balls: empty input");
    if (labels.size() != store.rows()) throw std::invalid_argument("generate_balls: labels missing or mismatched");
    if (subspace.empty() || !subspace.fits(store.cols())) {
        throw std::invalid_argument("generate_balls: subspace out of range");
    }
    const double threshold = options.purity_threshold;
    const Matrix projected = store.select_cols(subspace.indices());
    const std::size_t n = projected.rows();

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;

    // Initial partition: k-means with one seed per class, at its centroid.
    std::vector<LabelId> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<std::vector<std::size_t>> pending;
    const std::size_t distinct = distinct_rows(projected, classes.size());
    KMeansOptions km;
    km.max_iter = options.max_iter;
    km.seed = options.seed;
    std::size_t k = classes.size();
    if (distinct >= k) {
        Matrix seeds;
        for (LabelId c : classes) seeds.append_row(class_centroid(projected, all, labels, c));
        km.seeds = std::move(seeds);
    } else {
        k = distinct;
    }
    if (k == 1) {
        pending.push_back(all);
    } else {
        for (auto& group : kmeans(projected, k, km).members()) {
            if (!group.empty()) pending.push_back(std::move(group));
        }
    }

    std::vector<GranularBall> done;
    while (!pending.empty()) {
        auto group = std::move(pending.back());
        pending.pop_back();
        GranularBall ball = make_ball(projected, std::move(group), labels, subspace);
        if (ball.size() < 2 || meets(ball.majority_count, ball.size(), threshold)) {
            done.push_back(std::move(ball));
            continue;
        }
        if (distinct_rows(projected.select_rows(ball.members), 2) < 2) {
            ball.residue = true;
            done.push_back(std::move(ball));
            continue;
        }
        auto [left, right] = split_two(projected, ball.members, labels, options);
        pending.push_back(std::move(right));
        pending.push_back(std::move(left));
    }
    std::sort(done.begin(), done.end(),
              [](const GranularBall& a, const GranularBall& b) { return a.members.front() < b.members.front(); });
    return done;
}

GranularBall insert_known(const GranularBall& ball, std::size_t instance_index, const Matrix& store) {
    if (instance_index >= store.rows()) throw std::invalid_argument("insert_known: index out of range");
    if (!ball.contains(store.row(instance_index))) {
        throw std::invalid_argument("insert_known: instance lies outside the ball");
    }
    GranularBall out = ball;
    auto it = std::lower_bound(out.members.begin(), out.members.end(), instance_index);
    if (it != out.members.end() && *it == instance_index) return out;
    out.members.insert(it, instance_index);
    ++out.majority_count;
    return out;
}

}  // namespace cfs
