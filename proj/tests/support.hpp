#pragma once

// Shared fixtures, generators and brute-force oracles for the unit tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cfs/dataset.hpp"
#include "cfs/granular_ball.hpp"
#include "cfs/matrix.hpp"
#include "cfs/rng.hpp"

namespace testing {

inline std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(CFS_DATA_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cfs_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double gaussian(cfs::Rng& rng) {
    // Box-Muller; 1 - u keeps the log argument away from zero.
    const double u = 1.0 - rng.uniform();
    const double v = rng.uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
}

inline cfs::Matrix uniform_points(cfs::Rng& rng, std::size_t n, std::size_t d, double lo = 0.0, double hi = 1.0) {
    cfs::Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
    return m;
}

// Points drawn uniformly from the cube around `center` and kept if inside `radius`.
inline void append_blob(cfs::Matrix& out, cfs::Rng& rng, const std::vector<double>& center, double radius,
                        std::size_t n) {
    std::vector<double> p(center.size());
    for (std::size_t added = 0; added < n;) {
        double r2 = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double off = radius * (2.0 * rng.uniform() - 1.0);
            p[j] = center[j] + off;
            r2 += off * off;
        }
        if (r2 <= radius * radius) {
            out.append_row(p);
            ++added;
        }
    }
}

inline void append_gaussian(cfs::Matrix& out, cfs::Rng& rng, const std::vector<double>& center, double sigma,
                            std::size_t n) {
    std::vector<double> p(center.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = center[j] + sigma * gaussian(rng);
        out.append_row(p);
    }
}

inline std::vector<cfs::LabelId> random_labels(cfs::Rng& rng, std::size_t n, std::size_t classes) {
    std::vector<cfs::LabelId> y(n);
    for (auto& l : y) l = static_cast<cfs::LabelId>(rng.below(classes));
    return y;
}

inline cfs::Dataset labelled(cfs::Matrix x, std::vector<cfs::LabelId> y) {
    cfs::Dataset d;
    d.instances = std::move(x);
    d.labels = std::move(y);
    for (cfs::LabelId l = 0; l <= *std::max_element(d.labels->begin(), d.labels->end()); ++l)
        d.label_names.push_back("c" + std::to_string(l));
    return d;
}

// Instances in balls whose members all share one label, counted from the raw
// label vector rather than from the ball's bookkeeping.
inline std::size_t single_class_coverage(const std::vector<cfs::GranularBall>& balls,
                                         const std::vector<cfs::LabelId>& labels) {
    std::size_t covered = 0;
    for (const auto& b : balls) {
        bool same = true;
        for (auto m : b.members) same = same && labels[m] == labels[b.members.front()];
        if (same) covered += b.members.size();
    }
    return covered;
}

inline bool partitions(const std::vector<cfs::GranularBall>& balls, std::size_t n) {
    std::vector<int> seen(n, 0);
    for (const auto& b : balls)
        for (auto m : b.members) {
            if (m >= n) return false;
            ++seen[m];
        }
    return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

// Rows as sorted multiset, for partition checks.
inline std::vector<std::vector<double>> row_multiset(const cfs::Matrix& m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.rows(); ++i) rows.emplace_back(m.row(i).begin(), m.row(i).end());
    std::sort(rows.begin(), rows.end());
    return rows;
}

// Animal table: features Wing, Jump, Mammal, Swimming; dogs are class 0 and
// birds class 1. The first dog and the first bird are the two reference rows;
// the rest fill out every Wing/Jump combination for each class.
inline constexpr std::size_t kMammal = 2;
inline constexpr std::size_t kSwimming = 3;

inline cfs::Dataset animal_table() {
    cfs::Dataset d;
    d.instances = cfs::Matrix{{1, 1, 1, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {0, 0, 1, 1},
                              {0, 1, 0, 0}, {1, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}};
    d.labels = std::vector<cfs::LabelId>{0, 0, 0, 0, 1, 1, 1, 1};
    d.feature_names = {"Wing", "Jump", "Mammal", "Swimming"};
    d.label_names = {"Dog", "Bird"};
    return d;
}

// A period of swans: winged, jumping, non-mammal swimmers, enough of them for
// one DBSCAN cluster at the default min_pts.
inline cfs::Dataset swan_period(std::size_t count = 12) {
    cfs::Dataset d;
    d.instances = cfs::Matrix(0, 4);
    const std::vector<double> swan{1, 1, 0, 1};
    for (std::size_t i = 0; i < count; ++i) d.instances.append_row(swan);
    return d;
}

}  // namespace testing
