#pragma once

// JSON (de)serialization of instances, bump and Young specifications and
// search results, plus the fixed-format CSV writer.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbump/bump_functions.hpp"
#include "sbump/instance.hpp"
#include "sbump/search.hpp"
#include "sbump/testing.hpp"
#include "sbump/young.hpp"

namespace sbump {

using json = nlohmann::ordered_json;

class schema_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Number formatting

/// 17 significant digits; non-finite values as inf, -inf, nan.
inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Instances

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw schema_error(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw schema_error(where + ": bad field '" + key + "': " + e.what());
  }
}

inline json cubes_to_json(const std::vector<CubeId>& cubes) {
  json arr = json::array();
  for (const CubeId& q : cubes) arr.push_back(json::array({q.level, q.index}));
  return arr;
}

inline std::vector<CubeId> cubes_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw schema_error(where + ": cubes must be an array");
  std::vector<CubeId> out;
  for (const json& c : arr) {
    if (!c.is_array() || c.size() != 2) throw schema_error(where + ": each cube is [level, index]");
    out.push_back({c[0].get<int>(), c[1].get<std::uint64_t>()});
  }
  return out;
}

}  // namespace detail

inline json to_json(const Instance& inst) {
  json j;
  j["depth"] = inst.depth;
  j["p"] = inst.p;
  j["w_leaves"] = inst.w;
  j["sigma_leaves"] = inst.sigma;
  json sparse;
  if (inst.recipe) {
    sparse["strategy"] = to_string(inst.recipe->strategy.kind);
    sparse["eta"] = inst.recipe->eta;
    sparse["seed"] = inst.recipe->seed;
    if (inst.recipe->strategy.level >= 0) sparse["level"] = inst.recipe->strategy.level;
  } else {
    sparse["cubes"] = detail::cubes_to_json(inst.cubes);
  }
  j["sparse"] = sparse;
  j["clamped"] = inst.clamped;
  return j;
}

inline Instance instance_from_json(const json& j, const std::string& where = "instance") {
  const int depth = detail::field<int>(j, "depth", where);
  const double p = detail::field<double>(j, "p", where);
  auto w = detail::field<std::vector<double>>(j, "w_leaves", where);
  auto sigma = detail::field<std::vector<double>>(j, "sigma_leaves", where);
  if (!j.contains("sparse")) throw schema_error(where + ": missing field 'sparse'");
  const json& sp = j.at("sparse");
  try {
    Instance inst;
    if (sp.contains("cubes")) {
      inst = make_instance(depth, p, std::move(w), std::move(sigma), detail::cubes_from_json(sp.at("cubes"), where));
    } else {
      SparseRecipe r;
      r.strategy.kind = parse_strategy(detail::field<std::string>(sp, "strategy", where));
      if (sp.contains("level")) r.strategy.level = sp.at("level").get<int>();
      r.eta = detail::field<double>(sp, "eta", where);
      r.seed = detail::field<std::uint64_t>(sp, "seed", where);
      inst = make_instance(depth, p, std::move(w), std::move(sigma), r);
    }
    // Clamps recorded by an earlier load survive a round trip.
    if (j.contains("clamped")) inst.clamped += j.at("clamped").get<std::size_t>();
    return inst;
  } catch (const schema_error&) {
    throw;
  } catch (const json::exception& e) {
    throw schema_error(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw schema_error(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Bump and Young specifications

inline json to_json(const LogBump& b) { return json{{"family", to_string(b.family)}, {"eps", b.eps}}; }

inline LogBump log_bump_from_json(const json& j, const std::string& where) {
  return LogBump{parse_log_family(detail::field<std::string>(j, "family", where)), detail::field<double>(j, "eps", where)};
}

inline json to_json(const BumpSpec& s) {
  json psi;
  if (s.psi.tabulated()) {
    json t = json::array();
    for (const auto& [x, y] : s.psi.table) t.push_back(json::array({x, y}));
    psi["table"] = t;
  } else {
    psi["upper"] = to_json(s.psi.upper);
    psi["lower"] = to_json(s.psi.lower);
  }
  return json{{"psi", psi}, {"phi", to_json(s.phi)}};
}

/// Missing members keep their defaults.
inline BumpSpec bump_spec_from_json(const json& j, const std::string& where = "bumps") {
  BumpSpec s;
  if (!j.is_object()) throw schema_error(where + ": expected an object");
  try {
    if (j.contains("psi")) {
      const json& psi = j.at("psi");
      if (psi.contains("table")) {
        for (const json& row : psi.at("table")) s.psi.table.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
      }
      if (psi.contains("upper")) s.psi.upper = log_bump_from_json(psi.at("upper"), where + ".psi.upper");
      if (psi.contains("lower")) s.psi.lower = log_bump_from_json(psi.at("lower"), where + ".psi.lower");
    }
    if (j.contains("phi")) s.phi = log_bump_from_json(j.at("phi"), where + ".phi");
  } catch (const schema_error&) {
    throw;
  } catch (const std::exception& e) {
    throw schema_error(where + ": " + e.what());
  }
  return s;
}

inline json to_json(const YoungSpec& s) {
  json j{{"family", to_string(s.family)}, {"exponent", s.exponent}, {"eps", s.eps}};
  if (!s.points.empty()) {
    json t = json::array();
    for (const auto& [x, y] : s.points) t.push_back(json::array({x, y}));
    j["points"] = t;
  }
  return j;
}

inline YoungSpec young_spec_from_json(const json& j, const std::string& where = "young") {
  YoungSpec s;
  if (!j.is_object()) throw schema_error(where + ": expected an object");
  try {
    if (j.contains("family")) s.family = parse_young_family(j.at("family").get<std::string>());
    if (j.contains("exponent")) s.exponent = j.at("exponent").get<double>();
    if (j.contains("eps")) s.eps = j.at("eps").get<double>();
    if (j.contains("points")) {
      for (const json& row : j.at("points")) s.points.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    }
  } catch (const std::exception& e) {
    throw schema_error(where + ": " + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Search results

inline json to_json(const SearchConfig& c) {
  json strategies = json::array();
  for (const SparseStrategy& s : c.strategies) strategies.push_back(to_string(s.kind));
  return json{{"depth", c.depth},
              {"eta", c.eta},
              {"strategies", strategies},
              {"distribution",
               {{"kind", to_string(c.distribution.kind)},
                {"mu", c.distribution.mu},
                {"s", c.distribution.s},
                {"mass", c.distribution.mass},
                {"support", c.distribution.support}}},
              {"steps", c.steps},
              {"t0", c.t0},
              {"gamma", c.gamma},
              {"seed", c.seed},
              {"parallel", c.parallel}};
}

inline json to_json(const SearchResult& r) {
  return json{{"objective", r.objective},
              {"best_ratio", r.best_ratio},
              {"evaluations", r.evaluations},
              {"sub_ap_fraction", r.sub_ap_fraction},
              {"reverified", r.reverified},
              {"reverify_error", r.reverify_error},
              {"trace", r.trace},
              {"best_instance", to_json(r.best)}};
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
}

/// Writes `text` to `path`, or to stdout when path is empty or "-".
inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << text;
}

// ---------------------------------------------------------------------------
// CSV

/// A CSV table with "# key=value" header lines echoing the configuration.
/// Rows are written in lexicographic order.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void echo(std::string key, std::string value) { header.emplace_back(std::move(key), std::move(value)); }

  [[nodiscard]] std::string str() const {
    std::ostringstream out;
    for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << "\n";
    };
    line(columns);
    std::vector<std::vector<std::string>> sorted = rows;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& r : sorted) line(r);
    return out.str();
  }
};

inline const std::vector<std::string>& check_columns() {
  static const std::vector<std::string> c{"name", "lhs", "rhs", "bound", "ratio", "pass"};
  return c;
}

/// One CheckReport as a CSV row: name, lhs, rhs, bound, ratio, pass.
inline std::vector<std::string> csv_row(const CheckReport& r) {
  return {r.name, fmt17(r.lhs), fmt17(r.rhs), r.bound ? fmt17(*r.bound) : std::string(), fmt17(r.ratio),
          r.pass ? "1" : "0"};
}

inline CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable t;
  t.columns = {"depth", "best_ratio", "evaluations", "seconds"};
  for (const SweepRow& r : rows) {
    t.rows.push_back({std::to_string(r.depth), fmt17(r.best_ratio), std::to_string(r.evaluations), fmt17(r.seconds)});
  }
  return t;
}

/// Parsed CSV: header comments, column names, rows.
inline CsvTable parse_csv(const std::string& text, const std::string& where) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_columns = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (line.rfind("# ", 0) != 0 || eq == std::string::npos) throw schema_error(where + ": malformed header line");
      t.echo(line.substr(2, eq - 2), line.substr(eq + 1));
    } else if (!have_columns) {
      t.columns = split(line);
      have_columns = true;
    } else {
      auto cells = split(line);
      if (cells.size() != t.columns.size()) throw schema_error(where + ": row width differs from header");
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_columns) throw schema_error(where + ": no column header");
  return t;
}

}  // namespace sbump
