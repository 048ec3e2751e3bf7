// cfs: continual feature selection front end.
//
//   cfs scenario --data zoo.csv --init 0.3 --inc 0.1 --seed 7 --out run/
//   cfs init     --data run/t0.csv --out run/kb.json
//   cfs step     --kb run/kb.json --data run/t1.csv
//   cfs eval     --data run/full.csv --kb run/kb.json --k 3
//   cfs bench    --data pendigits.csv --init 0.3 --inc 0.1 --repeats 5
//   cfs sweep    --data zoo.csv --init 0.3 --inc 0.1
//
// Exit codes: 0 ok, 2 usage/config, 3 data, 4 knowledge-base format.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cfs/continual.hpp"
#include "cfs/dataset.hpp"
#include "cfs/errors.hpp"
#include "cfs/eval.hpp"
#include "cfs/rough_set.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitFormat = 4;

struct RunConfig {
    double purity_threshold = 0.65;
    double dbscan_eps = 0.3;
    std::size_t dbscan_min_pts = 10;
    std::size_t knn_k = 3;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(purity_threshold > 0.5 && purity_threshold <= 1.0)) {
            throw std::invalid_argument("purity threshold must lie in (0.5, 1], got " + std::to_string(purity_threshold));
        }
        if (!(dbscan_eps > 0.0)) throw std::invalid_argument("eps must be positive");
        if (dbscan_min_pts < 1) throw std::invalid_argument("min-pts must be at least 1");
        if (knn_k < 1) throw std::invalid_argument("k must be at least 1");
    }

    cfs::StreamParams stream() const { return {dbscan_eps, dbscan_min_pts}; }
};

template <class T>
void env_override(const char* name, T& value) {
    const char* raw = std::getenv(name);
    if (!raw || !*raw) return;
    std::istringstream in(raw);
    T parsed{};
    in >> parsed;
    if (!in || !in.eof()) throw std::invalid_argument(std::string("bad value for ") + name + ": '" + raw + "'");
    value = parsed;
}

RunConfig defaults_from_env() {
    RunConfig c;
    env_override("CFS_PURITY", c.purity_threshold);
    env_override("CFS_EPS", c.dbscan_eps);
    env_override("CFS_MIN_PTS", c.dbscan_min_pts);
    env_override("CFS_KNN_K", c.knn_k);
    env_override("CFS_SEED", c.seed);
    return c;
}

// Left-aligned first column, right-aligned the rest.
class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& out) const {
        std::vector<std::size_t> width;
        for (const auto& r : rows_) {
            width.resize(std::max(width.size(), r.size()), 0);
            for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
        }
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            for (std::size_t c = 0; c < rows_[i].size(); ++c) {
                if (c) out << "  ";
                out << (c == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[c])) << rows_[i][c];
            }
            out << '\n';
            if (i == 0) {
                std::size_t total = 0;
                for (auto w : width) total += w;
                out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
            }
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string fixed(double v, int digits = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string pct(double v) { return fixed(100.0 * v); }

struct DataFlags {
    std::string path;
    std::string label = "last";
    char delimiter = ',';

    cfs::Dataset load() const {
        cfs::CsvOptions opts;
        opts.label = cfs::parse_label_column(label);
        opts.delimiter = delimiter;
        return cfs::load_csv(path, opts);
    }
};

void add_data_flags(CLI::App* cmd, DataFlags& f, const std::string& default_label) {
    f.label = default_label;
    cmd->add_option("--data", f.path, "CSV file with a header row")->required();
    cmd->add_option("--label", f.label, "label column: name, zero-based index, 'last' or 'none'")->capture_default_str();
    cmd->add_option("--delimiter", f.delimiter, "field delimiter")->capture_default_str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw cfs::DataError("cannot write '" + path.string() + "'");
    out << text;
}

cfs::ClassOrder parse_order(const std::string& s) {
    if (s == "shuffled") return cfs::ClassOrder::Shuffled;
    if (s == "dataset") return cfs::ClassOrder::DatasetOrder;
    throw std::invalid_argument("class order must be 'shuffled' or 'dataset'");
}

std::string label_names_of(const cfs::Dataset& d, const std::vector<cfs::LabelId>& ids) {
    std::string s;
    for (auto id : ids) {
        if (!s.empty()) s += ' ';
        s += static_cast<std::size_t>(id) < d.label_names.size() ? d.label_names[static_cast<std::size_t>(id)]
                                                                 : std::to_string(id);
    }
    return s;
}

// ---------------------------------------------------------------- scenario

struct ScenarioArgs {
    DataFlags data;
    double init = 0.3;
    double inc = 0.1;
    std::string order = "shuffled";
    std::string out = ".";
    bool json = false;
};

void run_scenario(const ScenarioArgs& a, const RunConfig& cfg) {
    const cfs::Dataset raw = a.data.load();
    if (!raw.labeled()) throw std::invalid_argument("scenario needs a labelled dataset");
    const cfs::Dataset data = cfs::minmax_normalize(raw);
    const auto schedule = cfs::make_scenario(data, a.init, a.inc, cfg.seed, parse_order(a.order));
    const auto split = cfs::split_periods(data, schedule);

    const fs::path dir = a.out;
    fs::create_directories(dir);
    write_text(dir / "schedule.json", cfs::scenario_to_json(schedule) + "\n");
    cfs::write_csv(dir / "full.csv", data);
    cfs::write_csv(dir / "t0.csv", split.initial);
    for (std::size_t t = 0; t < split.streams.size(); ++t) {
        const auto& batch = split.streams[t];
        const std::string stem = "t" + std::to_string(t + 1);
        cfs::write_csv(dir / (stem + ".csv"), batch.data, false);
        std::ofstream truth(dir / (stem + ".labels.csv"), std::ios::binary | std::ios::trunc);
        if (!truth) throw cfs::DataError("cannot write truth file in '" + dir.string() + "'");
        truth << "class\n";
        for (auto id : batch.truth) truth << data.label_names.at(static_cast<std::size_t>(id)) << '\n';
    }

    if (a.json) {
        json j = json::parse(cfs::scenario_to_json(schedule));
        j["files"] = split.streams.size() + 1;
        std::cout << j.dump() << '\n';
        return;
    }
    Table table({"period", "file", "classes", "instances", "new classes"});
    table.add({"0", "t0.csv", std::to_string(schedule.initial_classes.size()), std::to_string(split.initial.size()),
               label_names_of(data, schedule.initial_classes)});
    for (std::size_t t = 0; t < split.streams.size(); ++t) {
        table.add({std::to_string(t + 1), "t" + std::to_string(t + 1) + ".csv",
                   std::to_string(schedule.periods[t].size()), std::to_string(split.streams[t].data.size()),
                   label_names_of(data, schedule.periods[t])});
    }
    table.print(std::cout);
}

// ---------------------------------------------------------------- init

struct InitArgs {
    DataFlags data;
    std::string out = "kb.json";
    std::string audit;
    bool json = false;
};

void run_init(const InitArgs& a, const RunConfig& cfg) {
    const cfs::Dataset data = a.data.load();
    if (!data.labeled()) throw std::invalid_argument("init needs labelled data");
    const auto built = cfs::build_knowledge_base_audited(data, cfg.purity_threshold, cfg.seed);
    cfs::save_kb(built.kb, a.out);
    if (!a.audit.empty()) write_text(a.audit, cfs::audit_to_json(built.audit) + "\n");

    if (a.json) {
        json j;
        j["kb"] = a.out;
        j["selected"] = built.kb.selected.indices();
        j["balls"] = built.kb.balls.size();
        j["audit"] = json::parse(cfs::audit_to_json(built.audit));
        std::cout << j.dump() << '\n';
        return;
    }
    Table table({"feature", "name", "baseline", "trial", "decision"});
    for (const auto& d : built.audit) {
        table.add({std::to_string(d.feature), d.feature < data.feature_names.size() ? data.feature_names[d.feature] : "",
                   std::to_string(d.baseline.covered_instances), std::to_string(d.trial.covered_instances),
                   d.removed ? "removed" : "kept"});
    }
    table.print(std::cout);
    std::cout << "balls: " << built.kb.balls.size() << "\nselected: " << built.kb.selected.to_string() << '\n';
}

// ---------------------------------------------------------------- step

struct StepArgs {
    DataFlags data;
    std::string kb = "kb.json";
    std::string reports = "reports.jsonl";
    bool json = false;
};

std::size_t count_lines(const fs::path& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) ++n;
    }
    return n;
}

void run_step(const StepArgs& a, const RunConfig& cfg) {
    cfs::KnowledgeBase kb = cfs::load_kb(a.kb);
    cfs::Dataset batch = a.data.load();
    batch.labels.reset();  // stream labels, if any, are never used
    const std::size_t period = count_lines(a.reports) + 1;
    auto outcome = cfs::process_period(std::move(kb), batch, cfg.stream(), period);
    cfs::save_kb(outcome.kb, a.kb);
    {
        std::ofstream log(a.reports, std::ios::binary | std::ios::app);
        if (!log) throw cfs::DataError("cannot append to '" + a.reports + "'");
        log << cfs::report_to_json_line(outcome.report) << '\n';
    }

    const auto& r = outcome.report;
    if (a.json) {
        std::cout << cfs::report_to_json_line(r) << '\n';
        return;
    }
    Table table({"period", "instances", "known", "unknown", "noise", "pseudo", "balls", "subset"});
    table.add({std::to_string(r.period_index), std::to_string(r.instance_count), std::to_string(r.known_count),
               std::to_string(r.unknown_count), std::to_string(r.noise_count), std::to_string(r.new_pseudo_labels.size()),
               std::to_string(r.new_balls), r.subset_after.to_string()});
    table.print(std::cout);
    std::cout << "added: " << r.added_features.to_string() << "  (" << fixed(r.times.total()) << " ms)\n";
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    DataFlags data;
    std::string kb = "kb.json";
    bool json = false;
};

void run_eval(const EvalArgs& a, const RunConfig& cfg) {
    const cfs::Dataset data = a.data.load();
    if (!data.labeled()) throw std::invalid_argument("eval needs labelled data");
    const cfs::KnowledgeBase kb = cfs::load_kb(a.kb);
    if (kb.dims() != data.dims()) {
        throw cfs::DataError("knowledge base has " + std::to_string(kb.dims()) + " features, data has " +
                             std::to_string(data.dims()));
    }
    const auto sel = cfs::stratified_tenfold(data, kb.selected, cfg.knn_k, cfg.seed);
    const auto all = cfs::stratified_tenfold(data, cfs::FeatureSubset::all(data.dims()), cfg.knn_k, cfg.seed);

    if (a.json) {
        json j;
        j["selected"] = json::parse(cfs::cv_to_json(sel));
        j["all_features"] = json::parse(cfs::cv_to_json(all));
        std::cout << j.dump() << '\n';
        return;
    }
    Table table({"features", "count", "accuracy %", "std", "macro-F1 %"});
    table.add({"selected " + kb.selected.to_string(), std::to_string(kb.selected.size()), pct(sel.mean_accuracy),
               pct(sel.std_accuracy), pct(sel.macro_f1_mean)});
    table.add({"all", std::to_string(data.dims()), pct(all.mean_accuracy), pct(all.std_accuracy),
               pct(all.macro_f1_mean)});
    table.print(std::cout);
    std::cout << "10-fold k-NN, k=" << cfg.knn_k << ", seed=" << cfg.seed << '\n';
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    DataFlags data;
    double init = 0.3;
    double inc = 0.1;
    std::string order = "shuffled";
    std::size_t repeats = 5;
    bool no_warmup = false;
    std::string csv;
    bool json = false;
};

void run_bench(const BenchArgs& a, const RunConfig& cfg) {
    const cfs::Dataset raw = a.data.load();
    if (!raw.labeled()) throw std::invalid_argument("bench needs a labelled dataset");
    const cfs::Dataset data = cfs::minmax_normalize(raw);
    const auto schedule = cfs::make_scenario(data, a.init, a.inc, cfg.seed, parse_order(a.order));

    cfs::BenchParams p;
    p.purity_threshold = cfg.purity_threshold;
    p.stream = cfg.stream();
    p.seed = cfg.seed;
    p.repeats = a.repeats;
    p.warmup = !a.no_warmup;
    const auto r = cfs::bench_continual_vs_scratch(data, schedule, p);

    if (!a.csv.empty()) {
        std::ofstream out(a.csv, std::ios::binary | std::ios::trunc);
        if (!out) throw cfs::DataError("cannot write '" + a.csv + "'");
        out << "period,revealed,continual_ms,scratch_ms\n";
        for (std::size_t t = 0; t < r.per_period_continual_ms.size(); ++t) {
            out << t << ',' << r.revealed_instances[t] << ',' << r.per_period_continual_ms[t] << ','
                << r.per_period_scratch_ms[t] << '\n';
        }
    }
    if (a.json) {
        std::cout << cfs::bench_to_json(r) << '\n';
        return;
    }
    Table table({"period", "revealed", "continual ms", "scratch ms", "continual subset", "scratch subset"});
    double cum_c = 0.0, cum_s = 0.0;
    for (std::size_t t = 0; t < r.per_period_continual_ms.size(); ++t) {
        cum_c += r.per_period_continual_ms[t];
        cum_s += r.per_period_scratch_ms[t];
        table.add({std::to_string(t), std::to_string(r.revealed_instances[t]), fixed(r.per_period_continual_ms[t]),
                   fixed(r.per_period_scratch_ms[t]), r.continual_subsets[t].to_string(),
                   r.scratch_subsets[t].to_string()});
    }
    table.add({"total", "", fixed(cum_c), fixed(cum_s), "", ""});
    table.print(std::cout);
    std::cout << "speedup (scratch / continual): " << fixed(r.cumulative_speedup) << "x, median of " << a.repeats
              << " repeats\n";
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    DataFlags data;
    double init = 0.3;
    double inc = 0.1;
    std::string order = "shuffled";
    std::vector<double> grid;
    bool json = false;
};

void run_sweep(const SweepArgs& a, const RunConfig& cfg) {
    const cfs::Dataset raw = a.data.load();
    if (!raw.labeled()) throw std::invalid_argument("sweep needs a labelled dataset");
    const auto grid = a.grid.empty() ? cfs::default_purity_grid() : a.grid;
    for (double t : grid) {
        RunConfig c = cfg;
        c.purity_threshold = t;
        c.validate();
    }
    const cfs::Dataset data = cfs::minmax_normalize(raw);
    const auto schedule = cfs::make_scenario(data, a.init, a.inc, cfg.seed, parse_order(a.order));
    const auto r = cfs::purity_sweep(data, schedule, grid, cfg.stream(), cfg.knn_k, cfg.seed);

    if (a.json) {
        json j;
        j["all_features"] = json::parse(cfs::cv_to_json(r.all_features));
        j["cells"] = json::array();
        for (const auto& c : r.cells) {
            j["cells"].push_back({{"purity", c.purity_threshold},
                                  {"initial_subset", c.initial_subset.indices()},
                                  {"final_subset", c.final_subset.indices()},
                                  {"cv", json::parse(cfs::cv_to_json(c.cv))}});
        }
        j["best"] = r.best;
        std::cout << j.dump() << '\n';
        return;
    }
    Table table({"purity", "initial", "final", "accuracy %", "std", "macro-F1 %"});
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        const auto& c = r.cells[i];
        table.add({fixed(c.purity_threshold) + (i == r.best ? " *" : ""), c.initial_subset.to_string(),
                   c.final_subset.to_string(), pct(c.cv.mean_accuracy), pct(c.cv.std_accuracy),
                   pct(c.cv.macro_f1_mean)});
    }
    table.add({"all", "", std::to_string(data.dims()) + " features", pct(r.all_features.mean_accuracy),
               pct(r.all_features.std_accuracy), pct(r.all_features.macro_f1_mean)});
    table.print(std::cout);
    std::cout << "envelope (*): purity " << fixed(r.envelope().purity_threshold) << ", delta vs all features "
              << fixed(100.0 * (r.envelope().cv.mean_accuracy - r.all_features.mean_accuracy)) << " points\n";
}

void add_schedule_flags(CLI::App* cmd, double& init, double& inc, std::string& order) {
    cmd->add_option("--init", init, "fraction of classes in the initial set")->capture_default_str();
    cmd->add_option("--inc", inc, "fraction of classes added per period")->capture_default_str();
    cmd->add_option("--order", order, "class order: shuffled or dataset")
        ->check(CLI::IsMember({"shuffled", "dataset"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    try {
        cfg = defaults_from_env();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"continual feature selection with granular-ball rough sets"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* cmd, bool stream, bool knn) {
        cmd->add_option("--purity", cfg.purity_threshold, "ball purity threshold, in (0.5, 1]")->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        if (stream) {
            cmd->add_option("--eps", cfg.dbscan_eps, "DBSCAN neighbourhood radius")->capture_default_str();
            cmd->add_option("--min-pts", cfg.dbscan_min_pts, "DBSCAN core-point count")->capture_default_str();
        }
        if (knn) cmd->add_option("--k", cfg.knn_k, "neighbours for k-NN")->capture_default_str();
    };

    ScenarioArgs scenario;
    auto* c_scenario = app.add_subcommand("scenario", "split a dataset into an initial set and stream periods");
    add_data_flags(c_scenario, scenario.data, "last");
    add_schedule_flags(c_scenario, scenario.init, scenario.inc, scenario.order);
    c_scenario->add_option("--out", scenario.out, "output directory")->capture_default_str();
    c_scenario->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    c_scenario->add_flag("--json", scenario.json, "print JSON instead of a table");

    InitArgs init;
    auto* c_init = app.add_subcommand("init", "build a knowledge base from labelled data");
    add_data_flags(c_init, init.data, "last");
    add_common(c_init, false, false);
    c_init->add_option("--out", init.out, "knowledge-base file")->capture_default_str();
    c_init->add_option("--audit", init.audit, "write the selection audit trail as JSON");
    c_init->add_flag("--json", init.json, "print JSON instead of a table");

    StepArgs step;
    auto* c_step = app.add_subcommand("step", "process one stream period");
    add_data_flags(c_step, step.data, "none");
    c_step->add_option("--kb", step.kb, "knowledge-base file, rewritten in place")->capture_default_str();
    c_step->add_option("--reports", step.reports, "JSON-lines report log")->capture_default_str();
    c_step->add_option("--eps", cfg.dbscan_eps, "DBSCAN neighbourhood radius")->capture_default_str();
    c_step->add_option("--min-pts", cfg.dbscan_min_pts, "DBSCAN core-point count")->capture_default_str();
    c_step->add_flag("--json", step.json, "print JSON instead of a table");

    EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "10-fold k-NN accuracy of the selected subset");
    add_data_flags(c_eval, eval.data, "last");
    c_eval->add_option("--kb", eval.kb, "knowledge-base file")->capture_default_str();
    c_eval->add_option("--k", cfg.knn_k, "neighbours for k-NN")->capture_default_str();
    c_eval->add_option("--seed", cfg.seed, "fold seed")->capture_default_str();
    c_eval->add_flag("--json", eval.json, "print JSON instead of a table");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "continual versus from-scratch wall time");
    add_data_flags(c_bench, bench.data, "last");
    add_schedule_flags(c_bench, bench.init, bench.inc, bench.order);
    add_common(c_bench, true, false);
    c_bench->add_option("--repeats", bench.repeats, "timed repeats (median reported)")->capture_default_str();
    c_bench->add_flag("--no-warmup", bench.no_warmup, "skip the untimed warm-up run");
    c_bench->add_option("--csv", bench.csv, "write per-period times as CSV");
    c_bench->add_flag("--json", bench.json, "print JSON instead of a table");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "replay a scenario over a purity grid and report the envelope");
    add_data_flags(c_sweep, sweep.data, "last");
    add_schedule_flags(c_sweep, sweep.init, sweep.inc, sweep.order);
    add_common(c_sweep, true, true);
    c_sweep->add_option("--grid", sweep.grid, "purity thresholds (default 0.65 0.75 0.85 0.95 1)");
    c_sweep->add_flag("--json", sweep.json, "print JSON instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        cfg.validate();
        if (*c_scenario) run_scenario(scenario, cfg);
        else if (*c_init) run_init(init, cfg);
        else if (*c_step) run_step(step, cfg);
        else if (*c_eval) run_eval(eval, cfg);
        else if (*c_bench) run_bench(bench, cfg);
        else if (*c_sweep) run_sweep(sweep, cfg);
    } catch (const cfs::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const cfs::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}
