#include "cfs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "cfs/clustering.hpp"
#include "cfs/errors.hpp"
#include "cfs/rng.hpp"

namespace cfs {

std::vector<LabelId> knn_predict(const Dataset& train, const Dataset& test, std::size_t k,
                                 const FeatureSubset& subset) {
    if (!train.labeled()) throw std::invalid_argument("knn_predict: training data must be labeled");
    if (k == 0) throw std::invalid_argument("knn_predict: k must be positive");
    if (k > train.size()) throw std::invalid_argument("knn_predict: k exceeds the training set size");
    if (train.dims() != test.dims()) throw DataError("knn_predict: train/test dimensionality mismatch");
    if (subset.empty() || !subset.fits(train.dims())) throw std::invalid_argument("knn_predict: bad feature subset");

    const Matrix tr = train.instances.select_cols(subset.indices());
    const Matrix te = test.instances.select_cols(subset.indices());
    const auto& labels = *train.labels;

    std::vector<LabelId> out;
    out.reserve(te.rows());
    std::vector<std::pair<double, std::size_t>> dist(tr.rows());
    for (std::size_t q = 0; q < te.rows(); ++q) {
        for (std::size_t i = 0; i < tr.rows(); ++i) dist[i] = {squared_euclidean(te.row(q), tr.row(i)), i};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::map<LabelId, std::size_t> votes;
        for (std::size_t j = 0; j < k; ++j) ++votes[labels[dist[j].second]];
        LabelId best = votes.begin()->first;
        std::size_t best_votes = 0;
        for (const auto& [label, count] : votes) {
            if (count > best_votes) {
                best_votes = count;
                best = label;
            }
        }
        out.push_back(best);
    }
    return out;
}

std::size_t Confusion::total() const {
    std::size_t t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

double Confusion::accuracy() const {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) correct += counts[i][i];
    const std::size_t t = total();
    return t == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(t);
}

double Confusion::macro_f1() const {
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const std::size_t actual = std::accumulate(counts[c].begin(), counts[c].end(), std::size_t{0});
        if (actual == 0) continue;
        std::size_t predicted = 0;
        for (const auto& row : counts) predicted += row[c];
        const double tp = static_cast<double>(counts[c][c]);
        const double precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        const double recall = tp / static_cast<double>(actual);
        sum += precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
        ++present;
    }
    return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

Confusion confusion_matrix(const std::vector<LabelId>& classes, const std::vector<LabelId>& truth,
                           const std::vector<LabelId>& predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("confusion_matrix: length mismatch");
    Confusion c;
    c.classes = classes;
    c.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
    auto index = [&](LabelId l) {
        auto it = std::lower_bound(classes.begin(), classes.end(), l);
        if (it == classes.end() || *it != l) throw std::invalid_argument("confusion_matrix: unknown label");
        return static_cast<std::size_t>(it - classes.begin());
    };
    for (std::size_t i = 0; i < truth.size(); ++i) ++c.counts[index(truth[i])][index(predicted[i])];
    return c;
}

std::vector<std::size_t> stratified_folds(const std::vector<LabelId>& labels, std::size_t folds, std::uint64_t seed) {
    std::map<LabelId, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    Rng rng(seed);
    std::vector<std::size_t> fold(labels.size(), 0);
    std::size_t offset = 0;
    for (auto& [label, rows] : by_class) {
        rng.shuffle(std::span<std::size_t>(rows));
        for (std::size_t j = 0; j < rows.size(); ++j) fold[rows[j]] = (offset + j) % folds;
        offset = (offset + rows.size()) % folds;
    }
    return fold;
}

CvResult stratified_tenfold(const Dataset& data, const FeatureSubset& subset, std::size_t k, std::uint64_t seed) {
    if (data.size() == 0) throw DataError("stratified_tenfold: empty data");
    if (!data.labeled()) throw std::invalid_argument("stratified_tenfold: data must be labeled");
    if (data.size() < kFolds) throw DataError("stratified_tenfold: fewer instances than folds");

    const auto& labels = *data.labels;
    const auto classes = data.class_ids();
    const auto fold = stratified_folds(labels, kFolds, seed);

    CvResult r;
    r.k_used = k;
    r.subset_used = subset;
    for (std::size_t f = 0; f < kFolds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
        const Dataset train = data.subset(train_rows);
        const Dataset test = data.subset(test_rows);
        const auto predicted = knn_predict(train, test, k, subset);
        r.confusions.push_back(confusion_matrix(classes, *test.labels, predicted));
        r.fold_accuracies.push_back(r.confusions.back().accuracy());
        r.fold_macro_f1.push_back(r.confusions.back().macro_f1());
    }
    const double n = static_cast<double>(kFolds);
    r.mean_accuracy = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / n;
    double var = 0.0;
    for (double a : r.fold_accuracies) var += (a - r.mean_accuracy) * (a - r.mean_accuracy);
    r.std_accuracy = std::sqrt(var / n);
    r.macro_f1_mean = std::accumulate(r.fold_macro_f1.begin(), r.fold_macro_f1.end(), 0.0) / n;
    return r;
}

DetectionMetrics unknown_detection_metrics(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("unknown_detection_metrics: length mismatch");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) ++tp;
        else if (predicted[i]) ++fp;
        else if (truth[i]) ++fn;
    }
    DetectionMetrics m;
    m.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

std::vector<double> default_purity_grid() { return {0.65, 0.75, 0.85, 0.95, 1.0}; }

SweepResult purity_sweep(const Dataset& data, const ScenarioSchedule& schedule, const std::vector<double>& thresholds,
                         const StreamParams& stream, std::size_t k, std::uint64_t seed) {
    if (thresholds.empty()) throw std::invalid_argument("purity_sweep: no thresholds");
    const ScenarioSplit split = split_periods(data, schedule);
    SweepResult out;
    out.all_features = stratified_tenfold(data, FeatureSubset::all(data.dims()), k, seed);
    for (double t : thresholds) {
        const ScenarioRun run = replay_scenario(split, t, seed, stream);
        SweepCell cell;
        cell.purity_threshold = t;
        cell.initial_subset = run.initial_subset;
        cell.final_subset = run.kb.selected;
        cell.cv = stratified_tenfold(data, cell.final_subset, k, seed);
        if (cell.cv.mean_accuracy > (out.cells.empty() ? -1.0 : out.cells[out.best].cv.mean_accuracy)) {
            out.best = out.cells.size();
        }
        out.cells.push_back(std::move(cell));
    }
    return out;
}

std::string cv_to_json(const CvResult& r) {
    nlohmann::json j;
    j["k"] = r.k_used;
    j["subset"] = r.subset_used.indices();
    j["fold_accuracies"] = r.fold_accuracies;
    j["fold_macro_f1"] = r.fold_macro_f1;
    j["mean_accuracy"] = r.mean_accuracy;
    j["std_accuracy"] = r.std_accuracy;
    j["macro_f1_mean"] = r.macro_f1_mean;
    return j.dump();
}

}  // namespace cfs
