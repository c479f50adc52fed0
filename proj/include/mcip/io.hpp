#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcip/error.hpp"
#include "mcip/gaussian.hpp"
#include "mcip/graph.hpp"
#include "mcip/loglinear.hpp"

namespace mcip::io {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(unquote(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> lines(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss{std::string(text)};
  while (std::getline(ss, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    out.push_back(cur);
  }
  return out;
}

inline bool looks_like_json(std::string_view text) {
  text = trim(text);
  return !text.empty() && (text.front() == '{' || text.front() == '[');
}

inline std::string at_line(std::size_t n, const std::string& msg) { return "line " + std::to_string(n) + ": " + msg; }

inline double parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw InputError(at_line(line, "'" + std::string(s) + "' is not a number"));
  return v;
}

inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

/// Graph document, either
///
///   vertices: A,B,C
///   edge: A B
///   edge: B C
///
/// (blank lines and `#` comments ignored) or
/// {"vertices": ["A","B","C"], "edges": [["A","B"],["B","C"]]}.
inline UndirectedGraph parse_graph(std::string_view text) {
  if (detail::looks_like_json(text)) {
    const auto j = detail::parse_json(text);
    try {
      std::vector<Label> vertices = j.at("vertices").get<std::vector<Label>>();
      std::vector<Edge> edges;
      for (const auto& e : j.value("edges", nlohmann::json::array())) {
        if (!e.is_array() || e.size() != 2) throw InputError("each edge must be a two-element array");
        edges.emplace_back(e[0].get<Label>(), e[1].get<Label>());
      }
      return UndirectedGraph(std::move(vertices), edges);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("malformed graph JSON: ") + e.what());
    }
  }

  std::vector<Label> vertices;
  std::map<Label, std::size_t> declared;
  bool have_vertices = false;
  std::vector<Edge> edges;
  const auto ls = detail::lines(text);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = detail::trim(ls[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw InputError(detail::at_line(lineno, "expected 'vertices:' or 'edge:'"));
    const auto key = detail::trim(line.substr(0, colon));
    const auto rest = detail::trim(line.substr(colon + 1));
    if (key == "vertices") {
      if (have_vertices) throw InputError(detail::at_line(lineno, "duplicate 'vertices:' line"));
      have_vertices = true;
      if (rest.empty()) continue;
      for (auto& v : detail::split(rest, ',')) {
        if (v.empty()) throw InputError(detail::at_line(lineno, "empty vertex label"));
        if (!declared.emplace(v, vertices.size()).second)
          throw InputError(detail::at_line(lineno, "duplicate vertex '" + v + "'"));
        vertices.push_back(std::move(v));
      }
    } else if (key == "edge") {
      if (!have_vertices) throw InputError(detail::at_line(lineno, "'edge:' before 'vertices:'"));
      std::istringstream ss{std::string(rest)};
      std::string x, y, extra;
      if (!(ss >> x >> y) || (ss >> extra)) throw InputError(detail::at_line(lineno, "edge needs exactly two labels"));
      for (const auto& v : {x, y})
        if (!declared.contains(v)) throw InputError(detail::at_line(lineno, "edge uses undeclared vertex '" + v + "'"));
      edges.emplace_back(x, y);
    } else {
      throw InputError(detail::at_line(lineno, "unknown key '" + std::string(key) + "'"));
    }
  }
  if (!have_vertices) throw InputError("graph file has no 'vertices:' line");
  try {
    return UndirectedGraph(std::move(vertices), edges);
  } catch (const InputError& e) {
    throw InputError(std::string("invalid graph: ") + e.what());
  }
}

inline std::string format_graph(const UndirectedGraph& g) {
  std::string out = "vertices: ";
  for (std::size_t i = 0; i < g.size(); ++i) out += (i ? "," : "") + g.label(i);
  out += '\n';
  for (const auto& [x, y] : g.edges()) out += "edge: " + x + " " + y + "\n";
  return out;
}

inline nlohmann::json graph_to_json(const UndirectedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [x, y] : g.edges()) edges.push_back({x, y});
  return {{"vertices", g.vertices()}, {"edges", edges}};
}

/// Set families: one comma-separated set per line, or JSON
/// {"amis": [[...], ...]} / a bare array of arrays.
inline std::vector<VertexSet> parse_families(std::string_view text) {
  std::vector<VertexSet> out;
  if (detail::looks_like_json(text)) {
    auto j = detail::parse_json(text);
    try {
      if (j.is_object()) j = j.at("amis");
      return j.get<std::vector<VertexSet>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("malformed set-family JSON: ") + e.what());
    }
  }
  const auto ls = detail::lines(text);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto line = detail::trim(ls[i]);
    if (line.empty() || line.front() == '#') continue;
    VertexSet s;
    for (auto& v : detail::split(line, ',')) {
      if (v.empty()) throw InputError(detail::at_line(i + 1, "empty label in set"));
      s.push_back(std::move(v));
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string format_families(const std::vector<VertexSet>& families) {
  std::string out;
  for (const auto& s : families) {
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i];
    out += '\n';
  }
  return out;
}

/// Long-form contingency table CSV: one column per variable holding level
/// names, then a final `count` column. Levels are ordered by first
/// appearance; cells that never appear are 0.
inline ContingencyTable parse_table_csv(std::string_view text) {
  const auto ls = detail::lines(text);
  std::size_t header_line = 0;
  while (header_line < ls.size() && detail::trim(ls[header_line]).empty()) ++header_line;
  if (header_line == ls.size()) throw InputError("table file is empty");
  const auto header = detail::split(ls[header_line], ',');
  if (header.size() < 2 || header.back() != "count")
    throw InputError(detail::at_line(header_line + 1, "header must list the variables followed by 'count'"));
  const std::size_t nv = header.size() - 1;

  std::vector<CategoricalVariable> vars;
  std::vector<std::map<std::string, std::size_t>> level_index(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    if (header[k].empty()) throw InputError(detail::at_line(header_line + 1, "empty variable name"));
    vars.push_back({header[k], {}});
  }
  struct Row {
    std::vector<std::size_t> coords;
    double count;
    std::size_t line;
  };
  std::vector<Row> rows;
  for (std::size_t i = header_line + 1; i < ls.size(); ++i) {
    if (detail::trim(ls[i]).empty()) continue;
    const auto fields = detail::split(ls[i], ',');
    if (fields.size() != header.size())
      throw InputError(detail::at_line(i + 1, "expected " + std::to_string(header.size()) + " fields, got " +
                                                  std::to_string(fields.size())));
    Row row{{}, detail::parse_number(fields.back(), i + 1), i + 1};
    if (!(row.count >= 0.0)) throw InputError(detail::at_line(i + 1, "count must be nonnegative"));
    for (std::size_t k = 0; k < nv; ++k) {
      if (fields[k].empty()) throw InputError(detail::at_line(i + 1, "empty level name"));
      auto [it, inserted] = level_index[k].emplace(fields[k], vars[k].levels.size());
      if (inserted) vars[k].levels.push_back(fields[k]);
      row.coords.push_back(it->second);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("table file has no data rows");

  std::vector<std::size_t> dims;
  for (const auto& v : vars) dims.push_back(v.levels.size());
  const mcip::detail::TableShape shape(dims);
  std::vector<double> counts(shape.size(), 0.0);
  std::vector<char> filled(shape.size(), 0);
  for (const auto& row : rows) {
    std::size_t cell = 0;
    for (std::size_t k = 0; k < nv; ++k) cell = cell * dims[k] + row.coords[k];
    if (filled[cell]) throw InputError(detail::at_line(row.line, "duplicate cell"));
    filled[cell] = 1;
    counts[cell] = row.count;
  }
  return ContingencyTable(std::move(vars), std::move(counts));
}

inline std::string format_number(double x, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, x);
  return buf;
}

inline std::string format_table_csv(const ContingencyTable& t, int precision = 6) {
  std::string out;
  for (const auto& v : t.variables()) out += v.name + ",";
  out += "count\n";
  for (std::size_t c = 0; c < t.size(); ++c) {
    for (std::size_t a = 0; a < t.variables().size(); ++a)
      out += t.variables()[a].levels[t.shape().coordinate(c, a)] + ",";
    out += format_number(t.counts()[c], precision) + "\n";
  }
  return out;
}

/// Numeric data CSV with a header row. A column named `class` (any case) is
/// dropped and reported through `warnings`.
inline DataMatrix parse_data_csv(std::string_view text, std::vector<std::string>* warnings = nullptr) {
  const auto ls = detail::lines(text);
  std::size_t header_line = 0;
  while (header_line < ls.size() && detail::trim(ls[header_line]).empty()) ++header_line;
  if (header_line == ls.size()) throw InputError("data file is empty");
  const auto header = detail::split(ls[header_line], ',');
  std::vector<bool> keep(header.size(), true);
  std::vector<Label> labels;
  for (std::size_t k = 0; k < header.size(); ++k) {
    std::string lower = header[k];
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "class") {
      keep[k] = false;
      if (warnings) warnings->push_back("dropping non-numeric column '" + header[k] + "'");
      continue;
    }
    if (header[k].empty()) throw InputError(detail::at_line(header_line + 1, "empty column name"));
    labels.push_back(header[k]);
  }
  std::vector<double> values;
  for (std::size_t i = header_line + 1; i < ls.size(); ++i) {
    if (detail::trim(ls[i]).empty()) continue;
    const auto fields = detail::split(ls[i], ',');
    if (fields.size() != header.size())
      throw InputError(detail::at_line(i + 1, "expected " + std::to_string(header.size()) + " fields, got " +
                                                  std::to_string(fields.size())));
    for (std::size_t k = 0; k < fields.size(); ++k)
      if (keep[k]) values.push_back(detail::parse_number(fields[k], i + 1));
  }
  return DataMatrix(std::move(labels), std::move(values));
}

}  // namespace mcip::io
