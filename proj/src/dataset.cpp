#include "cfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "cfs/errors.hpp"

namespace cfs {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (ch == '"') {
            if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else {
                quoted = !quoted;
            }
        } else if (ch == delimiter && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<std::size_t> resolve_label_index(const LabelColumn& label, const std::vector<std::string>& header) {
    return std::visit(
        [&](const auto& sel) -> std::optional<std::size_t> {
            using T = std::decay_t<decltype(sel)>;
            if constexpr (std::is_same_v<T, NoLabel>) {
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, LastColumn>) {
                return header.size() - 1;
            } else if constexpr (std::is_same_v<T, std::string>) {
                auto it = std::find(header.begin(), header.end(), sel);
                if (it == header.end()) throw DataError("label column '" + sel + "' not in header");
                return static_cast<std::size_t>(it - header.begin());
            } else {
                if (sel >= header.size()) {
                    throw DataError("label column index " + std::to_string(sel) + " out of range");
                }
                return sel;
            }
        },
        label);
}

}  // namespace

std::vector<LabelId> Dataset::class_ids() const {
    if (!labels) return {};
    std::set<LabelId> ids(labels->begin(), labels->end());
    return {ids.begin(), ids.end()};
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.instances = instances.select_rows(rows);
    out.feature_names = feature_names;
    out.label_names = label_names;
    if (labels) {
        std::vector<LabelId> l;
        l.reserve(rows.size());
        for (auto r : rows) l.push_back((*labels)[r]);
        out.labels = std::move(l);
    }
    return out;
}

LabelColumn parse_label_column(const std::string& text) {
    if (text == "none") return NoLabel{};
    if (text == "last") return LastColumn{};
    if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return static_cast<std::size_t>(std::stoull(text));
    }
    return text;
}

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
        if (!trim(line).empty()) {
            header = split_line(line, options.delimiter);
            break;
        }
    }
    if (header.empty()) throw DataError("empty dataset: no header row");

    const auto label_idx = resolve_label_index(options.label, header);
    const std::size_t d = header.size() - (label_idx ? 1 : 0);
    if (d == 0) throw DataError("dataset has no feature columns");

    Dataset data;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!label_idx || c != *label_idx) data.feature_names.push_back(header[c]);
    }

    std::vector<LabelId> labels;
    std::unordered_map<std::string, LabelId> label_ids;
    std::vector<double> values(d);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line, options.delimiter);
        if (cells.size() != header.size()) {
            throw DataError("ragged rows: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, header has " + std::to_string(header.size()));
        }
        std::size_t f = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (label_idx && c == *label_idx) {
                auto [it, inserted] = label_ids.try_emplace(cells[c], static_cast<LabelId>(label_ids.size()));
                if (inserted) data.label_names.push_back(cells[c]);
                labels.push_back(it->second);
                continue;
            }
            const auto v = parse_number(cells[c]);
            if (!v) {
                throw DataError("non-numeric feature cell '" + cells[c] + "' at line " + std::to_string(line_no) +
                                ", column " + std::to_string(c + 1));
            }
            values[f++] = *v;
        }
        data.instances.append_row(values);
    }
    if (data.instances.rows() == 0) throw DataError("empty dataset: no data rows");
    if (label_idx) data.labels = std::move(labels);
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), options);
}

void write_csv(const std::filesystem::path& path, const Dataset& data, bool include_labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    const bool with_labels = include_labels && data.labels.has_value();
    for (std::size_t c = 0; c < data.dims(); ++c) {
        if (c) out << ',';
        out << (c < data.feature_names.size() ? data.feature_names[c] : "f" + std::to_string(c));
    }
    if (with_labels) out << ",class";
    out << '\n';
    out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto row = data.instances.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << row[c];
        }
        if (with_labels) {
            const LabelId id = (*data.labels)[r];
            out << ',';
            if (id >= 0 && static_cast<std::size_t>(id) < data.label_names.size()) {
                out << data.label_names[static_cast<std::size_t>(id)];
            } else {
                out << id;
            }
        }
        out << '\n';
    }
}

Dataset minmax_normalize(const Dataset& data) {
    Dataset out = data;
    const std::size_t n = data.size();
    const std::size_t d = data.dims();
    for (std::size_t c = 0; c < d; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < n; ++r) {
            lo = std::min(lo, data.instances(r, c));
            hi = std::max(hi, data.instances(r, c));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < n; ++r) {
            out.instances(r, c) = range > 0.0 ? (data.instances(r, c) - lo) / range : 0.0;
        }
    }
    return out;
}

}  // namespace cfs
