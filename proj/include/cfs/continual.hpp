#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cfs/dataset.hpp"
#include "cfs/feature_subset.hpp"
#include "cfs/granular_ball.hpp"
#include "cfs/matrix.hpp"
#include "cfs/rough_set.hpp"

namespace cfs {

// Pseudo-labels are allocated upward from here; dataset label-ids stay below.
inline constexpr LabelId kPseudoLabelBase = LabelId{1} << 20;

inline bool is_pseudo_label(LabelId id) { return id >= kPseudoLabelBase; }

// Ball set plus selected subset carried across stream periods. Every stored
// instance belongs to exactly one ball; the store is kept in ball-major order.
struct KnowledgeBase {
    static constexpr int kVersion = 1;

    Matrix store;                      // member coordinates, all d features
    std::vector<LabelId> store_labels; // label each member counts as
    std::vector<GranularBall> balls;
    FeatureSubset selected;
    std::vector<LabelId> known_labels;   // sorted
    std::vector<LabelId> pseudo_labels;  // in allocation order
    LabelId pseudo_counter = kPseudoLabelBase;
    double purity_threshold = 0.65;
    std::uint64_t generation_seed = 0;
    // Unknown instances DBSCAN left as noise; clustered again next period.
    Matrix noise_buffer;
    int version = kVersion;

    std::size_t dims() const { return store.cols(); }
    LabelId allocate_pseudo_label();

    bool operator==(const KnowledgeBase&) const = default;
};

KnowledgeBase build_knowledge_base(const Dataset& initial, double purity_threshold, std::uint64_t seed);

// Selection audit from the most recent build, for reporting.
struct BuildResult {
    KnowledgeBase kb;
    std::vector<FeatureDecision> audit;
};
BuildResult build_knowledge_base_audited(const Dataset& initial, double purity_threshold, std::uint64_t seed);

struct Known {
    LabelId label;
    std::size_t ball;
    bool operator==(const Known&) const = default;
};
struct Unknown {
    bool operator==(const Unknown&) const = default;
};
using Identification = std::variant<Known, Unknown>;

// Known iff some closed ball contains the instance; the nearest containing
// center wins, ties to the lowest ball index.
Identification identify(const KnowledgeBase& kb, std::span<const double> instance);

struct StreamParams {
    double eps = 0.3;
    std::size_t min_pts = 10;
};

struct PhaseTimes {
    double identify_ms = 0.0;
    double cluster_ms = 0.0;
    double granulate_ms = 0.0;
    double enhance_ms = 0.0;
    double total() const { return identify_ms + cluster_ms + granulate_ms + enhance_ms; }
};

struct PeriodReport {
    std::size_t period_index = 0;
    std::size_t instance_count = 0;
    std::size_t known_count = 0;
    std::size_t unknown_count = 0;
    std::size_t noise_count = 0;  // points left in the carryover buffer
    std::vector<LabelId> new_pseudo_labels;
    std::size_t new_balls = 0;
    FeatureSubset subset_before;
    FeatureSubset added_features;
    FeatureSubset subset_after;
    // Per instance of the batch, in arrival order.
    std::vector<bool> flagged_unknown;
    PhaseTimes times;
};

struct PeriodOutcome {
    KnowledgeBase kb;
    PeriodReport report;
};

PeriodOutcome process_period(KnowledgeBase kb, const Dataset& batch, const StreamParams& params,
                             std::size_t period_index = 1);

struct EnhancementResult {
    FeatureSubset subset;
    std::vector<FeatureDecision> audit;
};

// Tests every feature outside kb.selected, in ascending order, against a
// working set that starts at all features. Kept candidates join the subset.
EnhancementResult enhance_subset_audited(const KnowledgeBase& kb, std::uint64_t seed);
FeatureSubset enhance_subset(const KnowledgeBase& kb, std::uint64_t seed);

std::string kb_to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const std::string& text);
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_kb(const std::filesystem::path& path);

std::string report_to_json_line(const PeriodReport& report, bool include_timings = true);

// Full replay of a scenario: initial build, then every stream period in order.
struct ScenarioRun {
    KnowledgeBase kb;
    FeatureSubset initial_subset;
    std::vector<PeriodReport> reports;
    double build_ms = 0.0;
};

ScenarioRun replay_scenario(const ScenarioSplit& split, double purity_threshold, std::uint64_t seed,
                            const StreamParams& params);

}  // namespace cfs
