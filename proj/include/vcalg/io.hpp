#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "vcalg/errors.hpp"
#include "vcalg/oneway_stats.hpp"
#include "vcalg/rational.hpp"

namespace vcalg::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Rational from a JSON string ("p/q", decimal) or number (integers only,
/// floats are rejected to keep inputs exact).
inline Rational rational_from_json(const json& v, const std::string& field) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.dump());
  throw InputError("field '" + field + "' must be an integer or a rational string");
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

inline const json& require(const json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError("missing field '" + key + "'");
  return obj.at(key);
}

/// One-way sufficient statistics:
/// {"sizes":[..],"mults":[..],"means":[..],"betweenSS":[..],"withinSS":".."}
inline OneWayStats oneway_stats_from_json(const json& j) {
  auto ints = [&](const std::string& key) {
    const json& a = require(j, key);
    if (!a.is_array()) throw InputError("field '" + key + "' must be an array");
    std::vector<int> out;
    for (const auto& x : a) {
      if (!x.is_number_integer()) throw InputError("field '" + key + "' must hold integers");
      out.push_back(x.get<int>());
    }
    return out;
  };
  auto rationals = [&](const std::string& key) {
    const json& a = require(j, key);
    if (!a.is_array()) throw InputError("field '" + key + "' must be an array");
    std::vector<Rational> out;
    for (const auto& x : a) out.push_back(rational_from_json(x, key));
    return out;
  };
  return make_stats(ints("sizes"), ints("mults"), rationals("means"), rationals("betweenSS"),
                    rational_from_json(require(j, "withinSS"), "withinSS"));
}

/// Rows of a headed CSV file; cells trimmed of surrounding whitespace.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) {
      auto b = cell.find_first_not_of(" \t\r\"");
      auto e = cell.find_last_not_of(" \t\r\"");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (!have_header) {
      t.header = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw InputError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw InputError("CSV input is empty");
  return t;
}

/// Groups in order of first appearance plus, for covariate files, the
/// covariate rows aligned with the observations.
struct LongFormat {
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> values;               // per group
  std::vector<std::vector<std::vector<Rational>>> covariates;  // per group, per row
  std::vector<std::string> covariate_names;
};

/// "group,value" or "group,y,x1,...,xp".
inline LongFormat parse_long_csv(const std::string& text) {
  CsvTable t = parse_csv(text);
  if (t.header.size() < 2) throw InputError("CSV needs at least the columns group and value");
  LongFormat out;
  for (std::size_t c = 2; c < t.header.size(); ++c) out.covariate_names.push_back(t.header[c]);
  std::map<std::string, std::size_t> index;
  for (const auto& row : t.rows) {
    auto [it, inserted] = index.try_emplace(row[0], out.labels.size());
    if (inserted) {
      out.labels.push_back(row[0]);
      out.values.emplace_back();
      out.covariates.emplace_back();
    }
    out.values[it->second].push_back(parse_rational(row[1]));
    std::vector<Rational> x;
    for (std::size_t c = 2; c < row.size(); ++c) x.push_back(parse_rational(row[c]));
    out.covariates[it->second].push_back(std::move(x));
  }
  return out;
}

/// "row,col,rep,value" into cells[i][j] = replicate values, with checks for a
/// complete balanced layout. Levels are indexed by first appearance.
inline std::vector<std::vector<std::vector<Rational>>> parse_twoway_csv(const std::string& text) {
  CsvTable t = parse_csv(text);
  if (t.header.size() != 4) throw InputError("two-way CSV needs the columns row,col,rep,value");
  std::map<std::string, std::size_t> rows, cols;
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> obs;
  for (const auto& r : t.rows) {
    auto ri = rows.try_emplace(r[0], rows.size()).first->second;
    auto ci = cols.try_emplace(r[1], cols.size()).first->second;
    obs.emplace_back(ri, ci, parse_rational(r[3]));
  }
  std::vector<std::vector<std::vector<Rational>>> cells(rows.size(), std::vector<std::vector<Rational>>(cols.size()));
  for (auto& [ri, ci, v] : obs) cells[ri][ci].push_back(v);
  std::size_t n = cells.empty() || cells[0].empty() ? 0 : cells[0][0].size();
  for (const auto& row : cells) {
    for (const auto& cell : row) {
      if (cell.empty() || cell.size() != n) throw InputError("two-way layout is not balanced");
    }
  }
  return cells;
}

}  // namespace vcalg::io
