#include <doctest.h>

#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>

#include "cfs/errors.hpp"
#include "cfs/eval.hpp"
#include "support.hpp"

using namespace cfs;

namespace {

// Brute-force k-NN: sort every training point by (distance, index), vote, and
// break vote ties toward the smallest label.
std::vector<LabelId> knn_oracle(const Dataset& train, const Dataset& test, std::size_t k, const FeatureSubset& sub) {
    std::vector<LabelId> out;
    for (std::size_t q = 0; q < test.size(); ++q) {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t i = 0; i < train.size(); ++i) {
            double s = 0.0;
            for (auto j : sub.indices()) {
                const double diff = train.instances(i, j) - test.instances(q, j);
                s += diff * diff;
            }
            d.emplace_back(std::sqrt(s), i);
        }
        std::sort(d.begin(), d.end());
        std::map<LabelId, std::size_t> votes;
        for (std::size_t i = 0; i < k; ++i) ++votes[(*train.labels)[d[i].second]];
        LabelId best = votes.begin()->first;
        for (const auto& [l, c] : votes)
            if (c > votes[best]) best = l;
        out.push_back(best);
    }
    return out;
}

void snap(Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = std::round(m(i, j) * 4.0) / 4.0;
}

Dataset two_blobs(cfs::Rng& rng, std::size_t per_class) {
    Matrix x(0, 2);
    testing::append_blob(x, rng, {0.2, 0.2}, 0.1, per_class);
    testing::append_blob(x, rng, {0.8, 0.8}, 0.1, per_class);
    std::vector<LabelId> y(per_class, 0);
    y.insert(y.end(), per_class, 1);
    return testing::labelled(x, y);
}

Dataset four_blobs(cfs::Rng& rng) {
    Matrix x(0, 3);
    std::vector<LabelId> y;
    const std::vector<std::vector<double>> centers{{0.1, 0.1, 0.5}, {0.9, 0.1, 0.5}, {0.1, 0.9, 0.5}, {0.9, 0.9, 0.5}};
    for (std::size_t c = 0; c < centers.size(); ++c) {
        testing::append_blob(x, rng, centers[c], 0.05, 15);
        y.insert(y.end(), 15, static_cast<LabelId>(c));
    }
    return testing::labelled(x, y);
}

}  // namespace

TEST_CASE("knn examples") {
    const Dataset train = testing::labelled(Matrix{{0.0}, {0.1}, {0.2}, {1.0}, {1.1}}, {0, 0, 1, 1, 1});
    const Dataset query = testing::labelled(Matrix{{0.05}, {1.05}, {0.2}}, {0, 0, 0});
    CHECK(knn_predict(train, query, 1, FeatureSubset{0}) == std::vector<LabelId>{0, 1, 1});
    CHECK(knn_predict(train, query, 3, FeatureSubset{0}) == std::vector<LabelId>{0, 1, 0});
    // k = n is a plain majority vote.
    CHECK(knn_predict(train, query, 5, FeatureSubset{0}) == std::vector<LabelId>{1, 1, 1});
    // A two-way vote tie goes to the smaller label.
    const Dataset pair = testing::labelled(Matrix{{0.0}, {1.0}}, {1, 0});
    CHECK(knn_predict(pair, query, 2, FeatureSubset{0}) == std::vector<LabelId>{0, 0, 0});

    CHECK_THROWS_AS(knn_predict(train, query, 0, FeatureSubset{0}), std::invalid_argument);
    CHECK_THROWS_AS(knn_predict(train, query, 6, FeatureSubset{0}), std::invalid_argument);
    CHECK_THROWS_AS(knn_predict(train, testing::labelled(Matrix{{0, 0}}, {0}), 1, FeatureSubset{0}), DataError);
}

TEST_CASE("knn matches a brute-force oracle") {
    cfs::Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.below(200), d = 1 + rng.below(5);
        Matrix x = testing::uniform_points(rng, n, d);
        // Coarse grid so distance ties are common.
        if (trial % 2) snap(x);
        const Dataset train = testing::labelled(x, testing::random_labels(rng, n, 1 + rng.below(4)));
        Matrix q = testing::uniform_points(rng, 20, d);
        if (trial % 2) snap(q);
        Dataset query;
        query.instances = q;
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < d; ++j)
            if (j == 0 || rng.below(2)) idx.push_back(j);
        const FeatureSubset sub(idx);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 7));
        CHECK(knn_predict(train, query, k, sub) == knn_oracle(train, query, k, sub));
    }
}

TEST_CASE("confusion algebra") {
    const std::vector<LabelId> classes{0, 1, 2};
    const std::vector<LabelId> truth{0, 0, 0, 1, 1, 2, 2, 2, 2, 1};
    const std::vector<LabelId> pred{0, 1, 0, 1, 1, 2, 0, 2, 2, 2};
    const auto c = confusion_matrix(classes, truth, pred);
    CHECK(c.total() == 10);
    CHECK(c.counts[0] == std::vector<std::size_t>{2, 1, 0});
    CHECK(c.counts[1] == std::vector<std::size_t>{0, 2, 1});
    CHECK(c.counts[2] == std::vector<std::size_t>{1, 0, 3});
    CHECK(c.accuracy() == doctest::Approx(0.7));

    // Per-class F1 from the cells: 2pr/(p+r).
    double f = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        double tp = static_cast<double>(c.counts[k][k]), col = 0.0, row = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            col += static_cast<double>(c.counts[j][k]);
            row += static_cast<double>(c.counts[k][j]);
        }
        const double p = tp / col, r = tp / row;
        f += 2 * p * r / (p + r);
    }
    CHECK(std::abs(c.macro_f1() - f / 3.0) <= 1e-12);

    CHECK_THROWS_AS(confusion_matrix(classes, truth, std::vector<LabelId>{0}), std::invalid_argument);
    CHECK_THROWS_AS(confusion_matrix(classes, std::vector<LabelId>{7}, std::vector<LabelId>{0}), std::invalid_argument);
}

TEST_CASE("macro f1 ignores classes absent from the truth") {
    const auto c = confusion_matrix({0, 1, 2}, {0, 0, 1, 1}, {0, 0, 1, 2});
    // Class 0: f1 = 1. Class 1: p = 1, r = 0.5, f1 = 2/3. Class 2 never occurs.
    CHECK(c.macro_f1() == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
}

TEST_CASE("stratified folds partition each class evenly") {
    cfs::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + rng.below(200);
        const auto y = testing::random_labels(rng, n, 1 + rng.below(6));
        const auto seed = rng.next();
        const auto folds = stratified_folds(y, kFolds, seed);
        REQUIRE(folds.size() == n);
        CHECK(stratified_folds(y, kFolds, seed) == folds);

        std::vector<std::size_t> total(kFolds, 0);
        std::map<LabelId, std::vector<std::size_t>> per_class;
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(folds[i] < kFolds);
            ++total[folds[i]];
            per_class[y[i]].resize(kFolds);
            ++per_class[y[i]][folds[i]];
        }
        for (const auto& [l, counts] : per_class) {
            const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
            CHECK(*hi - *lo <= 1);
        }
        const auto [lo, hi] = std::minmax_element(total.begin(), total.end());
        CHECK(*hi - *lo <= 1);
    }
}

TEST_CASE("separable blobs score perfectly") {
    cfs::Rng rng(3);
    const Dataset d = two_blobs(rng, 30);
    const auto r = stratified_tenfold(d, FeatureSubset::all(2), 3, 0);
    CHECK(r.mean_accuracy == 1.0);
    CHECK(r.std_accuracy == 0.0);
    CHECK(r.macro_f1_mean == 1.0);
    CHECK(r.fold_accuracies.size() == kFolds);
    CHECK(r.k_used == 3);
    CHECK(r.subset_used == FeatureSubset::all(2));
}

TEST_CASE("fold statistics agree with the fold list") {
    cfs::Rng rng(8);
    Dataset d = testing::labelled(testing::uniform_points(rng, 80, 3), testing::random_labels(rng, 80, 3));
    const auto r = stratified_tenfold(d, FeatureSubset{0, 2}, 5, 4);
    const double mean = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / kFolds;
    double var = 0.0;
    for (double a : r.fold_accuracies) var += (a - mean) * (a - mean);
    CHECK(r.mean_accuracy == doctest::Approx(mean).epsilon(1e-12));
    CHECK(r.std_accuracy == doctest::Approx(std::sqrt(var / kFolds)).epsilon(1e-12));
    std::size_t seen = 0;
    for (const auto& c : r.confusions) seen += c.total();
    CHECK(seen == 80);
}

TEST_CASE("shuffled labels sit near chance") {
    cfs::Rng rng(41);
    const Dataset d = testing::labelled(testing::uniform_points(rng, 200, 2), testing::random_labels(rng, 200, 2));
    const auto r = stratified_tenfold(d, FeatureSubset::all(2), 3, 0);
    CHECK(r.mean_accuracy > 0.35);
    CHECK(r.mean_accuracy < 0.65);
}

TEST_CASE("zoo with all features") {
    const Dataset zoo = minmax_normalize(load_csv(testing::data_file("zoo.csv")));
    const auto r = stratified_tenfold(zoo, FeatureSubset::all(16), 3, 0);
    CHECK(r.mean_accuracy > 0.86);
    CHECK(r.mean_accuracy < 0.96);
}

TEST_CASE("cross-validation preconditions") {
    CHECK_THROWS_AS(stratified_tenfold(Dataset{}, FeatureSubset{0}, 1, 0), DataError);
    cfs::Rng rng(1);
    const Dataset small = testing::labelled(testing::uniform_points(rng, 9, 2), testing::random_labels(rng, 9, 2));
    CHECK_THROWS_AS(stratified_tenfold(small, FeatureSubset{0}, 1, 0), DataError);
}

TEST_CASE("unknown detection metrics") {
    const std::vector<bool> truth{true, true, false, false};
    auto m = unknown_detection_metrics(truth, truth);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);

    m = unknown_detection_metrics(truth, {false, false, false, false});
    CHECK(m.recall == 0.0);
    CHECK(m.precision == 1.0);

    // 8 true positives, 2 false positives, 2 false negatives.
    std::vector<bool> t, p;
    for (int i = 0; i < 8; ++i) t.push_back(true), p.push_back(true);
    for (int i = 0; i < 2; ++i) t.push_back(false), p.push_back(true);
    for (int i = 0; i < 2; ++i) t.push_back(true), p.push_back(false);
    m = unknown_detection_metrics(t, p);
    CHECK(m.precision == doctest::Approx(0.8));
    CHECK(m.recall == doctest::Approx(0.8));
    CHECK(m.f1 == doctest::Approx(0.8));
    CHECK_THROWS_AS(unknown_detection_metrics(t, {true}), std::invalid_argument);
}

TEST_CASE("bench on a two-period toy scenario") {
    cfs::Rng rng(6);
    const Dataset d = four_blobs(rng);
    ScenarioSchedule s;
    s.class_order = {0, 1, 2, 3};
    s.initial_classes = {0, 1};
    s.periods = {{2}, {3}};
    BenchParams params;
    params.repeats = 3;
    params.stream.min_pts = 5;
    const auto r = bench_continual_vs_scratch(d, s, params);
    CHECK(r.per_period_continual_ms.size() == 3);
    CHECK(r.per_period_scratch_ms.size() == 3);
    CHECK(r.continual_runs.size() == 3);
    CHECK(r.scratch_runs.size() == 3);
    CHECK(r.revealed_instances == std::vector<std::size_t>{30, 45, 60});
    CHECK(r.continual_config_hash == r.scratch_config_hash);
    CHECK(r.continual_config_hash == bench_config_hash(d, s, params));
    CHECK(r.cumulative_speedup > 0.0);
    CHECK(r.continual_subsets.size() == 3);
    for (std::size_t t = 1; t < 3; ++t) CHECK(r.continual_subsets[t].includes(r.continual_subsets[t - 1]));

    // Median of three per slot.
    for (std::size_t t = 0; t < 3; ++t) {
        std::vector<double> v{r.continual_runs[0][t], r.continual_runs[1][t], r.continual_runs[2][t]};
        std::sort(v.begin(), v.end());
        CHECK(r.per_period_continual_ms[t] == v[1]);
    }

    const auto j = nlohmann::json::parse(bench_to_json(r));
    CHECK(j.is_object());

    BenchParams other = params;
    other.seed = 1;
    CHECK(bench_config_hash(d, s, other) != bench_config_hash(d, s, params));

    s.periods = {{2, 3}};
    CHECK_THROWS_AS(bench_continual_vs_scratch(d, s, params), std::invalid_argument);
}

TEST_CASE("purity sweep shape") {
    cfs::Rng rng(9);
    const Dataset d = four_blobs(rng);
    ScenarioSchedule s;
    s.class_order = {0, 1, 2, 3};
    s.initial_classes = {0, 1};
    s.periods = {{2}, {3}};
    const auto grid = default_purity_grid();
    CHECK(grid == std::vector<double>{0.65, 0.75, 0.85, 0.95, 1.0});
    const auto r = purity_sweep(d, s, grid, StreamParams{}, 3, 0);
    REQUIRE(r.cells.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(r.cells[i].purity_threshold == grid[i]);
        CHECK(r.cells[i].final_subset.includes(r.cells[i].initial_subset));
        CHECK(r.cells[i].cv.mean_accuracy <= r.envelope().cv.mean_accuracy);
    }
    for (std::size_t i = 0; i < r.best; ++i) CHECK(r.cells[i].cv.mean_accuracy < r.envelope().cv.mean_accuracy);
    CHECK(r.all_features.subset_used == FeatureSubset::all(3));
    CHECK_THROWS_AS(purity_sweep(d, s, {}, StreamParams{}, 3, 0), std::invalid_argument);
}
