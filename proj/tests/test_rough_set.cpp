#include <doctest.h>

#include <nlohmann/json.hpp>

#include "cfs/granular_ball.hpp"
#include "cfs/rough_set.hpp"
#include "support.hpp"

using namespace cfs;

namespace {

GranularBall fake_ball(std::size_t size, std::size_t majority, std::size_t first) {
    GranularBall b;
    for (std::size_t i = 0; i < size; ++i) b.members.push_back(first + i);
    b.majority_count = majority;
    return b;
}

GenerationOptions at(double t) {
    GenerationOptions g;
    g.purity_threshold = t;
    return g;
}

// Single-class coverage of balls rebuilt on `subset`.
std::size_t oracle_region(const Matrix& x, const std::vector<LabelId>& y, const FeatureSubset& subset, double t) {
    return testing::single_class_coverage(generate_balls(x, y, subset, at(t)), y);
}

}  // namespace

TEST_CASE("positive region examples") {
    std::vector<GranularBall> pure{fake_ball(3, 3, 0), fake_ball(4, 4, 3)};
    CHECK(positive_region(pure, 1.0).covered_instances == 7);
    CHECK(positive_region(pure, 1.0).qualifying_balls == 2);

    std::vector<GranularBall> mixed{fake_ball(3, 2, 0)};
    CHECK(positive_region(mixed, 1.0).covered_instances == 0);

    std::vector<GranularBall> sweep{fake_ball(5, 5, 0), fake_ball(10, 7, 5), fake_ball(5, 3, 15)};
    // Purities 1.0, 0.7, 0.6 with sizes 5, 10, 5; only the first two reach 0.65.
    const auto r = positive_region(sweep, 0.65);
    CHECK(r.covered_instances == 15);
    CHECK(r.qualifying_balls == 2);
    CHECK(r.threshold_used == 0.65);
}

TEST_CASE("positive region at threshold one matches a brute-force label scan") {
    cfs::Rng rng(4);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 2 + rng.below(40), d = 1 + rng.below(4);
        Matrix x = testing::uniform_points(rng, n, d);
        if (trial % 2)
            for (auto i = 0u; i < n; ++i) x(i, 0) = std::round(x(i, 0));
        const auto y = testing::random_labels(rng, n, 1 + rng.below(3));
        const auto balls = generate_balls(x, y, FeatureSubset::all(d), at(0.55 + 0.45 * rng.uniform()));
        CHECK(positive_region(balls, 1.0).covered_instances == testing::single_class_coverage(balls, y));
    }
}

TEST_CASE("a duplicated column is redundant") {
    const Matrix x{{0.1, 0.1, 0.9}, {0.2, 0.2, 0.1}, {0.3, 0.3, 0.5}, {0.4, 0.4, 0.3},
                   {0.6, 0.6, 0.7}, {0.7, 0.7, 0.2}, {0.8, 0.8, 0.8}, {0.9, 0.9, 0.4}};
    const std::vector<LabelId> y{0, 0, 1, 0, 1, 1, 0, 1};
    const FeatureSubset w = FeatureSubset::all(3);
    const auto base = positive_region(generate_balls(x, y, w, at(0.75)), kRegionPurity);
    CHECK(base.covered_instances == oracle_region(x, y, w, 0.75));
    const auto r = is_redundant(x, y, w, 1, 0.75, base, 0);
    CHECK(r.trial.covered_instances == oracle_region(x, y, w.without(1), 0.75));
    CHECK(r.redundant);
}

TEST_CASE("the only separating feature is not redundant") {
    const Matrix x{{0.0, 0.5}, {0.1, 0.5}, {0.2, 0.5}, {0.8, 0.5}, {0.9, 0.5}, {1.0, 0.5}};
    const std::vector<LabelId> y{0, 0, 0, 1, 1, 1};
    const FeatureSubset w = FeatureSubset::all(2);
    const auto base = positive_region(generate_balls(x, y, w, at(1.0)), kRegionPurity);
    CHECK(base.covered_instances == 6);
    const auto r = is_redundant(x, y, w, 0, 1.0, base, 0);
    CHECK(r.trial.covered_instances == oracle_region(x, y, FeatureSubset{1}, 1.0));
    CHECK(r.trial.covered_instances == 0);
    CHECK_FALSE(r.redundant);
    CHECK(is_redundant(x, y, w, 1, 1.0, base, 0).redundant);
}

TEST_CASE("any feature is redundant for a single class") {
    cfs::Rng rng(2);
    const Matrix x = testing::uniform_points(rng, 12, 3);
    const std::vector<LabelId> y(12, 0);
    const auto base = positive_region(generate_balls(x, y, FeatureSubset::all(3), at(1.0)), kRegionPurity);
    for (std::size_t a = 0; a < 3; ++a) CHECK(is_redundant(x, y, FeatureSubset::all(3), a, 1.0, base, 0).redundant);
}

TEST_CASE("redundancy preconditions") {
    const Matrix x{{0, 1}, {1, 0}};
    const std::vector<LabelId> y{0, 1};
    const PositiveRegionStat base;
    CHECK_THROWS_AS(is_redundant(x, y, FeatureSubset{0}, 0, 1.0, base, 0), std::invalid_argument);
    CHECK_THROWS_AS(is_redundant(x, y, FeatureSubset{0}, 1, 1.0, base, 0), std::invalid_argument);
}

TEST_CASE("selection with one feature leaves it alone") {
    const Matrix x{{0.1}, {0.9}};
    const std::vector<LabelId> y{0, 1};
    const auto s = select_features_initial(x, y, 1.0, 0);
    CHECK(s.subset == FeatureSubset{0});
    CHECK(s.audit.empty());
}

TEST_CASE("copy and constant columns are removed") {
    // f1 copies f0 and f2 is constant. Ascending order tests f0 first, and the
    // copy covers for it, so the survivor is f1.
    const Matrix x{{0.0, 0.0, 0.5}, {0.1, 0.1, 0.5}, {0.2, 0.2, 0.5}, {0.8, 0.8, 0.5}, {0.9, 0.9, 0.5}, {1.0, 1.0, 0.5}};
    const std::vector<LabelId> y{0, 0, 0, 1, 1, 1};
    const auto s = select_features_initial(x, y, 1.0, 0);
    CHECK(s.subset == FeatureSubset{1});
    REQUIRE(s.audit.size() == 3);
    CHECK(s.audit[0].removed);
    CHECK_FALSE(s.audit[1].removed);
    CHECK(s.audit[2].removed);

    // Oracle: the minimum-size subsets with full coverage are exactly {f0} and {f1}.
    const std::size_t full = oracle_region(x, y, FeatureSubset::all(3), 1.0);
    for (std::size_t mask = 1; mask < 8; ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < 3; ++j)
            if (mask >> j & 1u) idx.push_back(j);
        const bool keeps = oracle_region(x, y, FeatureSubset(idx), 1.0) >= full;
        if (idx.size() == 1) CHECK(keeps == (idx[0] != 2));
    }
}

TEST_CASE("single-class data keeps one feature") {
    cfs::Rng rng(6);
    const Matrix x = testing::uniform_points(rng, 10, 4);
    const std::vector<LabelId> y(10, 1);
    const auto s = select_features_initial(x, y, 0.8, 0);
    CHECK(s.subset.size() == 1);
    // The last feature is never tested, so it is the survivor.
    CHECK(s.subset == FeatureSubset{3});
    CHECK(s.audit.size() == 3);
}

TEST_CASE("selection preserves coverage and its audit is sound") {
    cfs::Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + rng.below(30), d = 1 + rng.below(6);
        Matrix x = testing::uniform_points(rng, n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (rng.below(3) == 0) x(i, j) = std::round(x(i, j));
        const auto y = testing::random_labels(rng, n, 2 + rng.below(2));
        const double t = trial % 2 ? 1.0 : 0.65 + 0.3 * rng.uniform();
        const auto s = select_features_initial(x, y, t, 0);

        CHECK_FALSE(s.subset.empty());
        CHECK(oracle_region(x, y, s.subset, t) >= oracle_region(x, y, FeatureSubset::all(d), t));
        for (std::size_t i = 0; i < s.audit.size(); ++i) {
            const auto& dec = s.audit[i];
            CHECK(dec.feature == i);
            if (dec.removed) {
                CHECK(dec.trial.covered_instances >= dec.baseline.covered_instances);
                CHECK_FALSE(s.subset.contains(dec.feature));
            } else {
                CHECK(dec.trial.covered_instances < dec.baseline.covered_instances);
                CHECK(s.subset.contains(dec.feature));
            }
        }
        const auto again = select_features_initial(x, y, t, 0);
        CHECK(again.subset == s.subset);
        CHECK(audit_to_json(again.audit) == audit_to_json(s.audit));
    }
}

TEST_CASE("audit json lists every decision") {
    const Matrix x{{0.0, 0.5}, {1.0, 0.5}};
    const std::vector<LabelId> y{0, 1};
    const auto j = nlohmann::json::parse(audit_to_json(select_features_initial(x, y, 1.0, 0).audit));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["feature"] == 0);
    CHECK(j[0]["decision"] == "kept");
    CHECK(j[0]["baseline"]["covered_instances"] == 2);
    CHECK(j[0]["trial"]["covered_instances"] == 0);
    CHECK(j[1]["decision"] == "removed");
}
