#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfs/continual.hpp"
#include "cfs/dataset.hpp"
#include "cfs/feature_subset.hpp"

namespace cfs {

// Majority vote over the k nearest training points in the subset's subspace.
// Distance ties go to the lower train index, vote ties to the lowest label-id.
std::vector<LabelId> knn_predict(const Dataset& train, const Dataset& test, std::size_t k,
                                 const FeatureSubset& subset);

// Square confusion matrix over a fixed class list; rows are truth, columns predictions.
struct Confusion {
    std::vector<LabelId> classes;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const;
    double accuracy() const;
    // Mean F1 over classes that occur in the truth column.
    double macro_f1() const;
};

Confusion confusion_matrix(const std::vector<LabelId>& classes, const std::vector<LabelId>& truth,
                           const std::vector<LabelId>& predicted);

struct CvResult {
    std::vector<double> fold_accuracies;
    std::vector<double> fold_macro_f1;
    std::vector<Confusion> confusions;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population standard deviation over folds
    double macro_f1_mean = 0.0;
    std::size_t k_used = 0;
    FeatureSubset subset_used;
};

inline constexpr std::size_t kFolds = 10;

// Fold index per row: each class is shuffled with the seed and dealt round-robin,
// continuing where the previous class stopped.
std::vector<std::size_t> stratified_folds(const std::vector<LabelId>& labels, std::size_t folds, std::uint64_t seed);

CvResult stratified_tenfold(const Dataset& data, const FeatureSubset& subset, std::size_t k, std::uint64_t seed);

struct DetectionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Binary metrics with "unknown" as the positive class. An empty denominator
// yields 1 (nothing to get wrong).
DetectionMetrics unknown_detection_metrics(const std::vector<bool>& truth, const std::vector<bool>& predicted);

struct BenchParams {
    double purity_threshold = 0.65;
    StreamParams stream;
    std::uint64_t seed = 0;
    std::size_t repeats = 5;
    bool warmup = true;
};

struct BenchResult {
    // Index 0 is the initial build; index t is stream period t. Medians over repeats.
    std::vector<double> per_period_continual_ms;
    std::vector<double> per_period_scratch_ms;
    std::vector<std::vector<double>> continual_runs;  // raw, per repeat
    std::vector<std::vector<double>> scratch_runs;
    std::vector<std::size_t> revealed_instances;      // data size each scratch period sees
    double cumulative_speedup = 0.0;
    std::uint64_t continual_config_hash = 0;
    std::uint64_t scratch_config_hash = 0;
    std::vector<FeatureSubset> continual_subsets;
    std::vector<FeatureSubset> scratch_subsets;
};

std::uint64_t bench_config_hash(const Dataset& data, const ScenarioSchedule& schedule, const BenchParams& params);

// Continual arm: one build, then process_period per period. Scratch arm: full
// labelled selection on everything revealed so far, using true labels.
BenchResult bench_continual_vs_scratch(const Dataset& data, const ScenarioSchedule& schedule, const BenchParams& params);

// Purity grid used for envelope reporting: 0.65 to 0.95 in 0.1 steps, then 1.
std::vector<double> default_purity_grid();

struct SweepCell {
    double purity_threshold = 0.0;
    FeatureSubset initial_subset;
    FeatureSubset final_subset;
    CvResult cv;
};

struct SweepResult {
    CvResult all_features;
    std::vector<SweepCell> cells;
    std::size_t best = 0;  // cell with the highest mean accuracy, first on ties

    const SweepCell& envelope() const { return cells.at(best); }
};

// Replays the scenario once per threshold and cross-validates each final subset
// on the full labelled data. `data` should already be normalized.
SweepResult purity_sweep(const Dataset& data, const ScenarioSchedule& schedule, const std::vector<double>& thresholds,
                         const StreamParams& stream, std::size_t k, std::uint64_t seed);

std::string cv_to_json(const CvResult& r);
std::string bench_to_json(const BenchResult& r);

}  // namespace cfs
