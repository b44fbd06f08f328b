#include "spreadverify/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace sv::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    return v;
}

using json = nlohmann::ordered_json;

json node_to_json(decision_tree const& t, std::size_t i) {
    auto const& n = t.node(i);
    if (n.is_leaf()) return json{{"leaf", to_int(n.leaf_label)}};
    json j;
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(t, n.left);
    j["right"] = node_to_json(t, n.right);
    return j;
}

decision_tree node_from_json(json const& j, std::size_t d) {
    if (!j.is_object()) throw input_error("model: node must be an object");
    if (j.contains("leaf")) {
        auto const& v = j.at("leaf");
        if (!v.is_number_integer()) throw input_error("model: leaf label must be 1 or -1");
        return decision_tree::leaf(label_from_int(v.get<long>()));
    }
    for (auto key : {"feature", "threshold", "left", "right"}) {
        if (!j.contains(key)) throw input_error(std::string("model: internal node lacks \"") + key + "\"");
    }
    auto const& f = j.at("feature");
    if (!f.is_number_unsigned()) throw input_error("model: feature must be a non-negative integer");
    auto const feature = f.get<std::size_t>();
    if (feature >= d) throw structural_error("model: feature " + std::to_string(feature) + " >= d");
    auto const& v = j.at("threshold");
    if (!v.is_number()) throw input_error("model: threshold must be a number");
    return decision_tree::split(feature, v.get<double>(), node_from_json(j.at("left"), d),
                                node_from_json(j.at("right"), d));
}

}  // namespace

dataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<dataset> out;
    std::size_t columns = 0;
    std::vector<double> row;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_cells(line);

        if (!out) {
            // a header has no numeric cell at all; a partly numeric row is data with a bad cell
            bool header = true;
            for (auto c : cells) header = header && !parse_number(c).has_value();
            columns = cells.size();
            if (columns < 2) throw structural_error("csv: need at least one feature and a label column");
            out.emplace(columns - 1);
            if (header) continue;
        }
        if (cells.size() != columns) {
            throw structural_error("csv: row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                   " columns, expected " + std::to_string(columns));
        }
        row.clear();
        for (std::size_t c = 0; c != columns; ++c) {
            auto v = parse_number(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw input_error("csv: malformed cell at row " + std::to_string(line_no) + ", column " +
                                  std::to_string(c + 1) + ": '" + std::string(cells[c]) + "'");
            }
            row.push_back(*v);
        }
        double const y = row.back();
        row.pop_back();
        label lab;
        if (y == 1.0) {
            lab = label::positive;
        } else if (y == -1.0 || y == 0.0) {
            lab = label::negative;
        } else {
            throw input_error("csv: label at row " + std::to_string(line_no) + " must be -1/+1 or 0/1");
        }
        out->add(row, lab);
    }
    if (!out || out->empty()) throw structural_error("csv: no data rows");
    return std::move(*out);
}

dataset load_csv(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path.string());
    return parse_csv(in);
}

void write_csv(std::ostream& out, dataset const& D) {
    for (std::size_t i = 0; i != D.size(); ++i) {
        for (double v : D.row(i)) out << json(v).dump() << ',';
        out << to_int(D.label_of(i)) << '\n';
    }
}

std::string serialize_model(ensemble const& T) {
    json j;
    j["version"] = model_version;
    j["d"] = T.dimension();
    j["trees"] = json::array();
    for (auto const& t : T.trees()) j["trees"].push_back(node_to_json(t, 0));
    return j.dump();
}

ensemble parse_model(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (json::exception const& e) {
        throw input_error(std::string("model: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("version") || !j.contains("d") || !j.contains("trees")) {
        throw input_error("model: expected an object with version, d and trees");
    }
    if (j.at("version") != model_version) throw input_error("model: unsupported version");
    if (!j.at("d").is_number_unsigned()) throw input_error("model: d must be a non-negative integer");
    auto const d = j.at("d").get<std::size_t>();
    if (!j.at("trees").is_array()) throw input_error("model: trees must be an array");
    std::vector<decision_tree> trees;
    for (auto const& node : j.at("trees")) trees.push_back(node_from_json(node, d));
    return ensemble(std::move(trees), d);
}

void save_model(ensemble const& T, std::filesystem::path const& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path.string());
    out << serialize_model(T) << '\n';
}

ensemble load_model(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

}  // namespace sv::io
