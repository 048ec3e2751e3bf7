#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cfs/continual.hpp"
#include "cfs/errors.hpp"

namespace cfs {

using nlohmann::json;

namespace {

json rows_to_json(const Matrix& m, std::span<const std::size_t> rows) {
    json arr = json::array();
    for (auto r : rows) {
        const auto row = m.row(r);
        arr.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return arr;
}

}  // namespace

std::string kb_to_json(const KnowledgeBase& kb) {
    json j;
    j["version"] = kb.version;
    j["dims"] = kb.dims();
    j["purity_threshold"] = kb.purity_threshold;
    j["seed"] = kb.generation_seed;
    j["selected"] = kb.selected.indices();
    j["known_labels"] = kb.known_labels;
    j["pseudo_labels"] = kb.pseudo_labels;
    j["pseudo_counter"] = kb.pseudo_counter;
    json balls = json::array();
    for (const auto& b : kb.balls) {
        std::vector<LabelId> member_labels;
        member_labels.reserve(b.members.size());
        for (auto m : b.members) member_labels.push_back(kb.store_labels[m]);
        balls.push_back({{"label", b.label},
                         {"center", b.center},
                         {"radius", b.radius},
                         {"subspace", b.subspace.indices()},
                         {"residue", b.residue},
                         {"members", rows_to_json(kb.store, b.members)},
                         {"member_labels", member_labels}});
    }
    j["balls"] = std::move(balls);
    std::vector<std::size_t> noise_rows(kb.noise_buffer.rows());
    for (std::size_t i = 0; i < noise_rows.size(); ++i) noise_rows[i] = i;
    j["noise_buffer"] = rows_to_json(kb.noise_buffer, noise_rows);
    return j.dump() + "\n";
}

KnowledgeBase kb_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed knowledge-base file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("version")) throw FormatError("malformed knowledge-base file: no version");
    try {
        const int version = j.at("version").get<int>();
        if (version != KnowledgeBase::kVersion) throw VersionMismatch(version, KnowledgeBase::kVersion);

        KnowledgeBase kb;
        const auto d = j.at("dims").get<std::size_t>();
        if (d == 0) throw FormatError("malformed knowledge-base file: zero dimensions");
        kb.purity_threshold = j.at("purity_threshold").get<double>();
        kb.generation_seed = j.at("seed").get<std::uint64_t>();
        kb.selected = FeatureSubset(j.at("selected").get<std::vector<std::size_t>>());
        kb.known_labels = j.at("known_labels").get<std::vector<LabelId>>();
        kb.pseudo_labels = j.at("pseudo_labels").get<std::vector<LabelId>>();
        kb.pseudo_counter = j.at("pseudo_counter").get<LabelId>();
        kb.store = Matrix(0, d);
        kb.noise_buffer = Matrix(0, d);
        if (kb.selected.empty() || !kb.selected.fits(d)) {
            throw FormatError("malformed knowledge-base file: selected features out of range");
        }

        for (const auto& jb : j.at("balls")) {
            GranularBall b;
            b.label = jb.at("label").get<LabelId>();
            b.center = jb.at("center").get<std::vector<double>>();
            b.radius = jb.at("radius").get<double>();
            b.subspace = FeatureSubset(jb.at("subspace").get<std::vector<std::size_t>>());
            b.residue = jb.at("residue").get<bool>();
            const auto members = jb.at("members").get<std::vector<std::vector<double>>>();
            const auto labels = jb.at("member_labels").get<std::vector<LabelId>>();
            if (members.empty() || members.size() != labels.size() || b.subspace.empty() || !b.subspace.fits(d) ||
                b.center.size() != b.subspace.size()) {
                throw FormatError("malformed knowledge-base file: inconsistent ball record");
            }
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (members[i].size() != d) throw FormatError("malformed knowledge-base file: member width");
                kb.store.append_row(members[i]);
                kb.store_labels.push_back(labels[i]);
                b.members.push_back(kb.store.rows() - 1);
            }
            b.majority_count = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), b.label));
            kb.balls.push_back(std::move(b));
        }
        for (const auto& row : j.at("noise_buffer").get<std::vector<std::vector<double>>>()) {
            if (row.size() != d) throw FormatError("malformed knowledge-base file: noise row width");
            kb.noise_buffer.append_row(row);
        }
        return kb;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed knowledge-base file: ") + e.what());
    }
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
    // Write-then-rename so a failure never leaves a half-written file behind.
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out << kb_to_json(kb);
        out.flush();
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return kb_from_json(buf.str());
}

std::string report_to_json_line(const PeriodReport& r, bool include_timings) {
    json j;
    j["period"] = r.period_index;
    j["instances"] = r.instance_count;
    j["known"] = r.known_count;
    j["unknown"] = r.unknown_count;
    j["noise"] = r.noise_count;
    j["new_pseudo_labels"] = r.new_pseudo_labels;
    j["new_balls"] = r.new_balls;
    j["subset_before"] = r.subset_before.indices();
    j["added_features"] = r.added_features.indices();
    j["subset_after"] = r.subset_after.indices();
    if (include_timings) {
        j["wall_time_ms"] = {{"identify", r.times.identify_ms},
                             {"cluster", r.times.cluster_ms},
                             {"granulate", r.times.granulate_ms},
                             {"enhance", r.times.enhance_ms}};
    }
    return j.dump();
}

}  // namespace cfs
