#ifndef RBOOST_IO_HPP
#define RBOOST_IO_HPP

#include "rboost/boosters.hpp"
#include "rboost/core.hpp"
#include "rboost/ensemble.hpp"
#include "rboost/random.hpp"
#include "rboost/weak_learners.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rboost {

inline constexpr std::string_view kLibraryVersion = "1.0.0";
inline constexpr int kModelFormatVersion = 1;

/// Raised for unreadable or malformed input files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CsvSchema {
  bool has_header = true;
  std::variant<std::monostate, std::string, std::size_t> target_column;  // monostate: last column
  char delimiter = ',';
  bool features_only = false;  // no target column at all (prediction input)
};

struct LoadedTable {
  Dataset data;
  std::vector<std::string> feature_names;
  std::string target_name;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

} // namespace detail

/// Reads a delimited numeric table. Non-target columns become features in file order.
inline LoadedTable load_csv_table(const std::filesystem::path& path, const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_line(line, schema.delimiter);
    if (schema.has_header && names.empty() && rows.empty()) {
      for (auto c : cells) names.emplace_back(c);
      width = names.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw IoError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                    " columns, expected " + std::to_string(width));
    std::vector<double> values;
    values.reserve(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = detail::parse_double(cells[c]);
      const std::string where = path.string() + ": line " + std::to_string(line_no) + ", column " +
                                (names.empty() ? std::to_string(c) : "'" + names[c] + "'");
      if (!v) throw IoError(where + ": cannot parse '" + std::string(cells[c]) + "' as a number");
      if (!std::isfinite(*v)) throw InvalidInput(where + ": non-finite value '" + std::string(cells[c]) + "'");
      values.push_back(*v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw IoError(path.string() + ": no data rows");
  if (names.empty())
    for (std::size_t c = 0; c < width; ++c) names.push_back("x" + std::to_string(c));

  std::optional<std::size_t> target;
  if (!schema.features_only) {
    if (std::holds_alternative<std::monostate>(schema.target_column)) {
      target = width - 1;
    } else if (const auto* idx = std::get_if<std::size_t>(&schema.target_column)) {
      if (*idx >= width)
        throw InvalidInput(path.string() + ": target column " + std::to_string(*idx) + " out of range (" +
                           std::to_string(width) + " columns)");
      target = *idx;
    } else {
      const auto& name = std::get<std::string>(schema.target_column);
      for (std::size_t c = 0; c < width; ++c)
        if (names[c] == name) target = c;
      if (!target) throw InvalidInput(path.string() + ": no column named '" + name + "'");
    }
    if (width < 2) throw InvalidInput(path.string() + ": need at least one feature column besides the target");
  }

  LoadedTable out;
  const std::size_t d = target ? width - 1 : width;
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(rows.size() * d);
  y.reserve(rows.size());
  for (const auto& r : rows)
    for (std::size_t c = 0; c < width; ++c) {
      if (target && c == *target)
        y.push_back(r[c]);
      else
        x.push_back(r[c]);
    }
  if (!target) y.assign(rows.size(), 0.0);
  for (std::size_t c = 0; c < width; ++c) {
    if (target && c == *target)
      out.target_name = names[c];
    else
      out.feature_names.push_back(names[c]);
  }
  out.data = Dataset(std::move(x), std::move(y), d);
  return out;
}

inline Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {}) {
  return load_csv_table(path, schema).data;
}

/// Writes features then target as the last column, full precision.
inline void write_csv(const Dataset& data, const std::filesystem::path& path, char delimiter = ',') {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << j << delimiter;
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << detail::format_double(v) << delimiter;
    out << detail::format_double(data.targets()[i]) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// Model persistence --------------------------------------------------------------

inline nlohmann::json tree_to_json(const RegressionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf())
      nodes.push_back({{"value", n.value}});
    else
      nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
  }
  return {{"dim", tree.dim()}, {"requested_splits", tree.requested_splits()}, {"nodes", std::move(nodes)}};
}

inline RegressionTree tree_from_json(const nlohmann::json& j) {
  std::vector<RegressionTree::Node> nodes;
  for (const auto& n : j.at("nodes")) {
    RegressionTree::Node node;
    if (n.contains("value")) {
      node.value = n.at("value").get<double>();
    } else {
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
    }
    nodes.push_back(node);
  }
  const auto dim = j.at("dim").get<std::size_t>();
  const auto count = static_cast<int>(nodes.size());
  for (const auto& n : nodes)
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count ||
                         static_cast<std::size_t>(n.feature) >= dim))
      throw IoError("model: malformed tree node");
  if (nodes.empty()) throw IoError("model: tree without nodes");
  return RegressionTree(std::move(nodes), dim, j.at("requested_splits").get<std::size_t>());
}

/// Self-describing JSON document: stages (alpha, beta), learner scales and full trees.
inline nlohmann::json model_to_json(const Ensemble& model, const nlohmann::json& manifest = nullptr) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : model.stages()) {
    const auto* tree = s.learner.tree();
    if (!tree) throw InvalidInput("model persistence supports tree learners only");
    stages.push_back({{"alpha", s.alpha}, {"beta", s.beta}, {"scale", s.learner.scale()}, {"tree", tree_to_json(*tree)}});
  }
  nlohmann::json doc = {{"format", "rboost-model"},
                        {"version", kModelFormatVersion},
                        {"offset", model.offset()},
                        {"stages", std::move(stages)}};
  if (!manifest.is_null()) doc["manifest"] = manifest;
  return doc;
}

inline Ensemble model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "rboost-model") throw IoError("not an rboost model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) throw IoError("unsupported model version " + std::to_string(version));
    Ensemble model(doc.at("offset").get<double>());
    for (const auto& s : doc.at("stages"))
      model.append(s.at("alpha").get<double>(), s.at("beta").get<double>(),
                   Learner(tree_from_json(s.at("tree")), s.at("scale").get<double>()));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model: ") + e.what());
  }
}

inline void save_model(const Ensemble& model, const std::filesystem::path& path, const nlohmann::json& manifest = nullptr) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << model_to_json(model, manifest).dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline Ensemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

// Result emission ----------------------------------------------------------------

/// Reproducibility record written next to every result file.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::string library_version{kLibraryVersion};
  std::vector<std::string> outputs;

  nlohmann::json to_json() const {
    return {{"command", command},
            {"config", config},
            {"seeds", seeds},
            {"library_version", library_version},
            {"rng", "mt19937_64/seed_seq/polar v" + std::to_string(Rng::kVersion)},
            {"outputs", outputs}};
  }
};

/// Named columns of preformatted cells.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::string> column_docs;  // one per column, may be empty
  std::vector<std::vector<std::string>> rows;
};

enum class TableFormat { Aligned, Delimited };

inline std::string render_table(const ResultTable& table, TableFormat format, std::string_view manifest_ref = {}) {
  if (table.rows.empty()) throw InvalidInput("emit_results: no rows");
  std::ostringstream out;
  if (format == TableFormat::Delimited) {
    if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      if (c < table.column_docs.size() && !table.column_docs[c].empty())
        out << "# " << table.columns[c] << ": " << table.column_docs[c] << '\n';
    auto emit = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
      out << '\n';
    };
    emit(table.columns);
    for (const auto& r : table.rows) emit(r);
    return out.str();
  }
  std::vector<std::size_t> width(table.columns.size());
  for (std::size_t c = 0; c < width.size(); ++c) width[c] = table.columns[c].size();
  for (const auto& r : table.rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
    }
    out << '\n';
  };
  emit(table.columns);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  emit(rule);
  for (const auto& r : table.rows) emit(r);
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Writes `table` to `path`; delimited output carries a comment naming the manifest.
inline void emit_results(const ResultTable& table, TableFormat format, const std::filesystem::path& path,
                         std::string_view manifest_ref = {}) {
  write_text(path, render_table(table, format, manifest_ref));
}

/// Parses a delimited result file written by emit_results.
inline ResultTable read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  ResultTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos && line.rfind("# manifest", 0) != 0)
        t.column_docs.emplace_back(detail::trim(std::string_view(line).substr(colon + 1)));
      continue;
    }
    std::vector<std::string> cells;
    for (auto c : detail::split_line(line, ',')) cells.emplace_back(c);
    if (t.columns.empty())
      t.columns = std::move(cells);
    else
      t.rows.push_back(std::move(cells));
  }
  if (t.columns.empty()) throw IoError(path.string() + ": no header line");
  return t;
}

} // namespace rboost

#endif // RBOOST_IO_HPP
