#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cfs/matrix.hpp"

namespace cfs {

// Decision table: n instances over d features with optional class labels.
struct Dataset {
    Matrix instances;
    std::optional<std::vector<LabelId>> labels;
    std::vector<std::string> feature_names;
    // label_names[id] is the raw CSV value for label-id `id`.
    std::vector<std::string> label_names;

    std::size_t size() const { return instances.rows(); }
    std::size_t dims() const { return instances.cols(); }
    bool labeled() const { return labels.has_value(); }

    // Sorted distinct label-ids present. Empty when unlabeled.
    std::vector<LabelId> class_ids() const;

    // Rows (and labels) at the given indices, in order.
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

struct NoLabel {};
struct LastColumn {};
// Column chosen by header name, zero-based index, the last column, or none at all.
using LabelColumn = std::variant<NoLabel, LastColumn, std::string, std::size_t>;

struct CsvOptions {
    LabelColumn label = LastColumn{};
    char delimiter = ',';
};

// Parses "none", "last", a header name, or a non-negative integer index.
LabelColumn parse_label_column(const std::string& text);

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {});
void write_csv(const std::filesystem::path& path, const Dataset& data, bool include_labels = true);

// Rescale each feature column to [0, 1]; constant columns map to 0.
Dataset minmax_normalize(const Dataset& data);

enum class ClassOrder { Shuffled, DatasetOrder };

struct ScenarioSchedule {
    static constexpr int kVersion = 1;

    std::vector<LabelId> class_order;
    std::vector<LabelId> initial_classes;
    std::vector<std::vector<LabelId>> periods;
    double init_fraction = 0.0;
    double inc_fraction = 0.0;
    std::uint64_t seed = 0;

    // Class counts: initial first, then one entry per period.
    std::vector<std::size_t> class_counts() const;

    bool operator==(const ScenarioSchedule&) const = default;
};

// floor(fraction * classes) and ceil(fraction * classes), robust to binary
// rounding of decimal fractions such as 0.1 * 30.
std::size_t initial_class_count(double fraction, std::size_t classes);
std::size_t increment_class_count(double fraction, std::size_t classes);

ScenarioSchedule make_scenario(const Dataset& data, double init_fraction, double inc_fraction,
                               std::uint64_t seed, ClassOrder order = ClassOrder::Shuffled);

std::string scenario_to_json(const ScenarioSchedule& schedule);
ScenarioSchedule scenario_from_json(const std::string& text);

// Stream batch: features only. True labels travel in `truth` for evaluation;
// `data.labels` is always empty.
struct StreamBatch {
    Dataset data;
    std::vector<LabelId> truth;
    std::vector<std::size_t> source_rows;
};

struct ScenarioSplit {
    Dataset initial;
    std::vector<std::size_t> initial_rows;
    std::vector<StreamBatch> streams;
};

ScenarioSplit split_periods(const Dataset& data, const ScenarioSchedule& schedule);

}  // namespace cfs
