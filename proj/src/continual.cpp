#include "cfs/continual.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "cfs/clustering.hpp"
#include "cfs/errors.hpp"
#include "cfs/stopwatch.hpp"

namespace cfs {

namespace {

// Reorders the store so each ball's members are contiguous, in ball order.
void canonicalize(KnowledgeBase& kb) {
    Matrix store;
    store.reserve_rows(kb.store.rows());
    std::vector<LabelId> labels;
    labels.reserve(kb.store_labels.size());
    for (auto& ball : kb.balls) {
        for (auto& m : ball.members) {
            store.append_row(kb.store.row(m));
            labels.push_back(kb.store_labels[m]);
            m = labels.size() - 1;
        }
    }
    if (store.rows() != kb.store.rows()) throw std::logic_error("knowledge base store has rows outside every ball");
    kb.store = std::move(store);
    kb.store_labels = std::move(labels);
}

std::size_t append_instance(KnowledgeBase& kb, std::span<const double> row, LabelId label) {
    kb.store.append_row(row);
    kb.store_labels.push_back(label);
    return kb.store.rows() - 1;
}

}  // namespace

LabelId KnowledgeBase::allocate_pseudo_label() {
    const LabelId id = pseudo_counter++;
    pseudo_labels.push_back(id);
    return id;
}

BuildResult build_knowledge_base_audited(const Dataset& initial, double purity_threshold, std::uint64_t seed) {
    if (initial.size() == 0) throw std::invalid_argument("build_knowledge_base: empty dataset");
    if (!initial.labeled()) throw std::invalid_argument("build_knowledge_base: initial data must be labeled");
    if (!(purity_threshold > 0.5 && purity_threshold <= 1.0)) {
        throw std::invalid_argument("build_knowledge_base: purity threshold must lie in (0.5, 1]");
    }
    for (LabelId l : *initial.labels) {
        if (l < 0 || is_pseudo_label(l)) throw std::invalid_argument("build_knowledge_base: label-id out of range");
    }

    BuildResult out;
    KnowledgeBase& kb = out.kb;
    kb.purity_threshold = purity_threshold;
    kb.generation_seed = seed;
    kb.store = initial.instances;
    kb.store_labels = *initial.labels;
    kb.known_labels = initial.class_ids();
    kb.noise_buffer = Matrix(0, kb.dims());

    GenerationOptions gen;
    gen.purity_threshold = purity_threshold;
    gen.seed = seed;
    kb.balls = generate_balls(kb.store, kb.store_labels, FeatureSubset::all(kb.dims()), gen);
    auto selection = select_features_initial(kb.store, kb.store_labels, purity_threshold, seed);
    kb.selected = std::move(selection.subset);
    out.audit = std::move(selection.audit);
    canonicalize(kb);
    return out;
}

KnowledgeBase build_knowledge_base(const Dataset& initial, double purity_threshold, std::uint64_t seed) {
    return build_knowledge_base_audited(initial, purity_threshold, seed).kb;
}

Identification identify(const KnowledgeBase& kb, std::span<const double> instance) {
    if (instance.size() != kb.dims()) throw DataError("identify: instance dimensionality mismatch");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_ball = kb.balls.size();
    for (std::size_t b = 0; b < kb.balls.size(); ++b) {
        const double dist = kb.balls[b].distance_to(instance);
        if (dist <= kb.balls[b].radius && dist < best) {
            best = dist;
            best_ball = b;
        }
    }
    if (best_ball == kb.balls.size()) return Unknown{};
    return Known{kb.balls[best_ball].label, best_ball};
}

EnhancementResult enhance_subset_audited(const KnowledgeBase& kb, std::uint64_t seed) {
    if (kb.balls.empty()) throw std::invalid_argument("enhance_subset: empty knowledge base");
    const std::size_t d = kb.dims();
    EnhancementResult out;
    out.subset = kb.selected;

    // Current KB balls are built on all features: their coverage is the baseline on A.
    auto baseline = positive_region(kb.balls, kRegionPurity);
    FeatureSubset working = FeatureSubset::all(d);
    for (std::size_t a : FeatureSubset::all(d).minus(kb.selected)) {
        const auto r = is_redundant(kb.store, kb.store_labels, working, a, kb.purity_threshold, baseline, seed);
        out.audit.push_back({a, r.redundant, baseline, r.trial});
        if (r.redundant) {
            working = working.without(a);
            baseline = r.trial;
        } else {
            out.subset = out.subset.with(a);
        }
    }
    return out;
}

FeatureSubset enhance_subset(const KnowledgeBase& kb, std::uint64_t seed) {
    return enhance_subset_audited(kb, seed).subset;
}

PeriodOutcome process_period(KnowledgeBase kb, const Dataset& batch, const StreamParams& params,
                             std::size_t period_index) {
    if (batch.dims() != kb.dims()) {
        throw DataError("batch has " + std::to_string(batch.dims()) + " features, knowledge base has " +
                        std::to_string(kb.dims()));
    }
    PeriodReport report;
    report.period_index = period_index;
    report.instance_count = batch.size();
    report.subset_before = kb.selected;
    report.flagged_unknown.assign(batch.size(), false);

    Stopwatch clock;

    // Identification runs against the balls as they stood at the start of the period.
    std::vector<Identification> ids;
    ids.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) ids.push_back(identify(kb, batch.instances.row(i)));

    Matrix pool = kb.noise_buffer;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto row = batch.instances.row(i);
        if (const auto* known = std::get_if<Known>(&ids[i])) {
            const std::size_t idx = append_instance(kb, row, known->label);
            kb.balls[known->ball] = insert_known(kb.balls[known->ball], idx, kb.store);
            ++report.known_count;
        } else {
            pool.append_row(row);
            report.flagged_unknown[i] = true;
            ++report.unknown_count;
        }
    }
    report.times.identify_ms = clock.lap_ms();

    const ClusterAssignment clusters =
        pool.rows() > 0 ? dbscan(pool, params.eps, params.min_pts) : ClusterAssignment{};
    report.times.cluster_ms = clock.lap_ms();

    GenerationOptions gen;
    gen.purity_threshold = kb.purity_threshold;
    gen.seed = kb.generation_seed;
    const auto groups = clusters.members();
    for (const auto& group : groups) {
        const LabelId pseudo = kb.allocate_pseudo_label();
        report.new_pseudo_labels.push_back(pseudo);
        std::vector<std::size_t> global;
        global.reserve(group.size());
        for (auto i : group) global.push_back(append_instance(kb, pool.row(i), pseudo));
        const Matrix local = pool.select_rows(group);
        const std::vector<LabelId> local_labels(group.size(), pseudo);
        for (auto ball : generate_balls(local, local_labels, FeatureSubset::all(kb.dims()), gen)) {
            for (auto& m : ball.members) m = global[m];
            kb.balls.push_back(std::move(ball));
            ++report.new_balls;
        }
    }
    Matrix noise(0, kb.dims());
    for (std::size_t i = 0; i < pool.rows(); ++i) {
        if (clusters.labels[i] == ClusterAssignment::kNoise) noise.append_row(pool.row(i));
    }
    kb.noise_buffer = std::move(noise);
    report.noise_count = kb.noise_buffer.rows();
    canonicalize(kb);
    report.times.granulate_ms = clock.lap_ms();

    kb.selected = enhance_subset(kb, kb.generation_seed);
    report.times.enhance_ms = clock.lap_ms();

    report.subset_after = kb.selected;
    report.added_features = kb.selected.minus(report.subset_before);
    return {std::move(kb), std::move(report)};
}

ScenarioRun replay_scenario(const ScenarioSplit& split, double purity_threshold, std::uint64_t seed,
                            const StreamParams& params) {
    ScenarioRun run;
    Stopwatch clock;
    run.kb = build_knowledge_base(split.initial, purity_threshold, seed);
    run.build_ms = clock.elapsed_ms();
    run.initial_subset = run.kb.selected;
    for (std::size_t t = 0; t < split.streams.size(); ++t) {
        auto outcome = process_period(std::move(run.kb), split.streams[t].data, params, t + 1);
        run.kb = std::move(outcome.kb);
        run.reports.push_back(std::move(outcome.report));
    }
    return run;
}

}  // namespace cfs
