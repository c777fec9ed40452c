// sbump: generate instances, compute constants, run the lemma checks,
// search for extremal instances and merge result tables.
//
// Exit codes: 0 success, 1 a hard-asserted check failed, 2 usage or
// configuration error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sbump/sbump.hpp"

using namespace sbump;

namespace {

constexpr int kExitHardFailure = 1;
constexpr int kExitUsage = 2;

struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

BumpSpec load_bumps(const std::string& path) {
  if (path.empty()) return BumpSpec{};
  return bump_spec_from_json(read_json_file(path), path);
}

YoungSpec load_young(const std::string& path) {
  if (path.empty()) return YoungSpec{};
  return young_spec_from_json(read_json_file(path), path);
}

Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path), path); }

std::string compact(const json& j) { return j.dump(); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// ---------------------------------------------------------------------------
// gen

struct GenFlags {
  int depth = 0;
  std::string strategy = "tower";
  int level = -1;
  double eta = 0.5;
  std::uint64_t seed = 0;
  std::string dist = "lognormal";
  double mu = 0.0;
  double s = 1.0;
  double mass = 1.0;
  double support = 0.25;
  double p = 2.0;
  std::string out = "-";
};

int run_gen(const GenFlags& f) {
  if (f.depth < 0 || f.depth > kMaxDepth) throw usage_error("--depth must lie in [0, 24]");
  if (!(f.eta > 0.0 && f.eta <= 1.0)) throw usage_error("--eta must lie in (0, 1]");
  if (!(f.p > 1.0)) throw usage_error("--p must exceed 1");
  LeafDistribution dist;
  dist.kind = parse_distribution(f.dist);
  dist.mu = f.mu;
  dist.s = f.s;
  dist.mass = f.mass;
  dist.support = f.support;
  SparseRecipe recipe;
  recipe.strategy.kind = parse_strategy(f.strategy);
  recipe.strategy.level = f.level;
  recipe.eta = f.eta;
  recipe.seed = mix_seed(f.seed, 1);
  const TreeGeometry g(f.depth);
  Rng rng(mix_seed(f.seed, 0));
  LeafPair leaves = draw_leaves(g, dist, rng);
  Instance inst = make_instance(f.depth, f.p, std::move(leaves.w), std::move(leaves.sigma), recipe);
  json j = to_json(inst);
  j["config"] = json{{"command", "gen"},          {"depth", f.depth},   {"strategy", f.strategy},
                     {"level", f.level},          {"eta", f.eta},       {"seed", f.seed},
                     {"dist", f.dist},            {"mu", f.mu},         {"s", f.s},
                     {"mass", f.mass},            {"support", f.support}, {"p", f.p}};
  write_text(f.out, j.dump(1) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// constants

struct ConstantsFlags {
  std::string in;
  std::string bumps;
  std::string young;
  std::string cubes = "sparse";
  std::string out = "-";
};

int run_constants(const ConstantsFlags& f) {
  if (f.cubes != "all" && f.cubes != "sparse") throw usage_error("--cubes must be 'all' or 'sparse'");
  const Instance inst = load_instance(f.in);
  const BumpSpec bspec = load_bumps(f.bumps);
  const YoungSpec yspec = load_young(f.young);
  const Bump bump(bspec);
  const WeightPair pair = inst.pair();
  const SparseFamily fam = inst.family();
  const std::vector<CubeId> scope = f.cubes == "all" ? all_cubes(pair.geometry()) : fam.cubes();

  CsvTable t;
  t.echo("command", "constants");
  t.echo("in", f.in);
  t.echo("bumps", compact(to_json(bspec)));
  t.echo("young", compact(to_json(yspec)));
  t.echo("cubes", f.cubes);
  t.echo("depth", std::to_string(inst.depth));
  t.echo("p", fmt17(inst.p));
  t.echo("clamped", std::to_string(inst.clamped));
  t.columns = {"name", "value", "argmax_level", "argmax_index", "note"};
  auto row = [&](const std::string& name, double v, std::optional<CubeId> arg, const std::string& note) {
    t.rows.push_back({name, fmt17(v), arg ? std::to_string(arg->level) : "", arg ? std::to_string(arg->index) : "",
                      note});
  };
  const SupResult ap = ap_constant_sup(pair, scope);
  row("a_p", ap.value, ap.argmax, "");
  const SupResult nu = nu_constant_sup(pair, bump, scope);
  row("nu_bump", nu.value, nu.argmax, "");
  const Young young(yspec, inst.p);
  if (young.bp_integral(inst.p).finite) {
    const OrliczResult li = orlicz_li_constant(pair, young, bump, scope);
    row("orlicz_li", li.value, li.argmax, "");
    row("orlicz_lacey", orlicz_lacey_constant(pair, young, bump, scope), std::nullopt, "");
  } else {
    row("orlicz_li", std::nan(""), std::nullopt, "Young function violates B_p");
    row("orlicz_lacey", std::nan(""), std::nullopt, "Young function violates B_p");
  }
  const SupResult ent = entropy_constant_sup(pair, bump, scope);
  row("entropy", ent.value, ent.argmax, "");
  row("maximal_bound", maximal_bound_constant(pair, bump, scope), std::nullopt, "");
  const TestingResult tp = testing_constant(pair, fam);
  row("testing_p", tp.value, tp.maximizer, "sup over R in S");
  const TestingResult td = testing_constant(pair.dual(), fam);
  row("testing_p_dual", td.value, td.maximizer, "sup over R in S");
  if (std::abs(inst.p - 2.0) <= 1e-12 && inst.depth <= kOperatorNormMaxDepth) {
    row("op_norm_p2", operator_norm_p2(fam, pair), std::nullopt, "");
  }
  write_text(f.out, t.str());
  return 0;
}

// ---------------------------------------------------------------------------
// check

struct CheckFlags {
  std::string in;
  std::string suite = "all";
  int trials = 100;
  std::uint64_t seed = 0;
  std::string bumps;
  std::string young;
  std::string out = "-";
};

struct CorpusEntry {
  std::string label;
  std::uint64_t seed = 0;
  Instance inst;
};

/// The seeded random corpus: depths 2..8, every strategy, eta in {1/4, 1/2},
/// p in {1.5, 2, 3}, mixed leaf distribution.
std::vector<CorpusEntry> random_corpus(int trials, std::uint64_t seed) {
  static const SparseStrategy::Kind kinds[] = {SparseStrategy::Kind::tower, SparseStrategy::Kind::random_greedy,
                                               SparseStrategy::Kind::all_above_level,
                                               SparseStrategy::Kind::stopping_time};
  static const double etas[] = {0.25, 0.5};
  static const double ps[] = {1.5, 2.0, 3.0};
  std::vector<CorpusEntry> out;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
    SearchConfig c;
    c.depth = 2 + i % 7;
    c.eta = etas[(i / 4) % 2];
    c.strategies = {SparseStrategy{kinds[i % 4]}};
    c.distribution.kind = LeafDistribution::Kind::mixed;
    c.distribution.s = 1.5;
    c.distribution.mass = 0.9;
    out.push_back({"random" + std::to_string(i), s, random_instance(c, ps[(i / 8) % 3], s)});
  }
  return out;
}

CheckReport equality_report(const std::string& name, double got, double expected, double tol) {
  CheckReport r = make_report(name, got, expected, 1.0);
  r.pass = std::abs(r.ratio - 1.0) <= tol;
  return r;
}

double max_relative_change(const CubeTable& a, const CubeTable& b, const std::vector<CubeId>& cubes) {
  double worst = 0.0;
  for (const CubeId& q : cubes) worst = std::max(worst, relative_error(b[q.node()], a[q.node()]));
  return worst;
}

std::vector<CheckReport> lemma_suite(const Instance& inst, const Bump& bump) {
  std::vector<CheckReport> out;
  const WeightPair pair = inst.pair();
  const SparseFamily fam = inst.family();
  const CubeTable entropy = entropy_lambda_table(pair, fam.cubes());
  const CubeTable psi_table = psi_lambda_table(pair, bump, fam.cubes());
  for (const CubeId& r : fam.cubes()) {
    const SparseFamily sub(fam.geometry(), fam.within(r));
    for (int k : realized_levels(sub, pair.sigma())) out.push_back(prop32_check(fam, pair.sigma(), r, k));
    out.push_back(prop33_check(fam, pair.sigma(), bump, r));
    out.push_back(sawyer_sum_bound(pair, fam, bump, r));
    const EsetReport e = eset_split_check(pair, fam, r);
    out.push_back(e.split);
    out.push_back(e.pointwise);
    out.push_back(make_report("lambda_condition_entropy" + cube_label(r),
                              lambda_condition_constant(fam, pair.sigma(), entropy, r), 1.0, std::nullopt));
  }
  CheckReport p31e = prop31_bound(pair, fam, entropy, bump);
  p31e.name = "prop31_entropy";
  out.push_back(p31e);
  CheckReport p31p = prop31_bound(pair, fam, psi_table, bump);
  p31p.name = "prop31_psi";
  out.push_back(p31p);
  const MainRatio m = theorem_main_ratio(pair, fam, bump);
  out.push_back(m.primal);
  out.push_back(m.dual);
  return out;
}

std::vector<CheckReport> cov_suite(const Instance& inst, std::uint64_t seed) {
  std::vector<CheckReport> out;
  const WeightPair pair = inst.pair();
  const SparseFamily fam = inst.family();
  const TreeGeometry& g = pair.geometry();
  std::vector<double> a_sigma, a_rand;
  Rng rng(mix_seed(seed, 77));
  for (const CubeId& q : fam.cubes()) {
    a_sigma.push_back(pair.sigma_avg(q));
    a_rand.push_back(std::exp(2.0 * rng.normal()));
  }
  const bool p2 = std::abs(pair.p() - 2.0) <= 1e-12;
  for (const auto& [name, a] : {std::pair{"cov_sigma", a_sigma}, std::pair{"cov_random", a_rand}}) {
    const CovSides s = cov_sides(g, fam.cubes(), a, pair.w(), pair.p());
    out.push_back(p2 ? cov_bracket_report(name, s) : make_report(name, s.lhs, s.rhs, std::nullopt));
  }
  return out;
}

std::vector<CheckReport> scaling_suite(const Instance& inst, const Bump& bump, const Young& young) {
  std::vector<CheckReport> out;
  const WeightPair pair = inst.pair();
  const SparseFamily fam = inst.family();
  const double p = pair.p();
  const double pc = pair.p_conjugate();
  const double t0 = testing_constant(pair, fam).value;
  const double a0 = ap_constant(pair, fam.cubes());
  const CubeTable ent0 = entropy_lambda_table(pair, fam.cubes());
  const CubeTable nu0 = psi_lambda_table(pair, bump, fam.cubes());
  const bool orlicz = young.bp_integral(p).finite;
  const CubeTable orl0 = orlicz ? orlicz_li_constant(pair, young, bump, fam.cubes()).lambda : CubeTable{};
  constexpr double tol = 1e-10;
  for (double c : {1e-6, 1e6}) {
    const std::string tag = c < 1.0 ? "c=1e-6" : "c=1e6";
    const WeightPair ps = pair.scaled(1.0, c);
    const WeightPair pw = pair.scaled(c, 1.0);
    out.push_back(equality_report("scale_testing_sigma_" + tag, testing_constant(ps, fam).value,
                                  std::pow(c, 1.0 / pc) * t0, tol));
    out.push_back(equality_report("scale_testing_w_" + tag, testing_constant(pw, fam).value,
                                  std::pow(c, 1.0 / p) * t0, tol));
    out.push_back(
        equality_report("scale_ap_sigma_" + tag, ap_constant(ps, fam.cubes()), std::pow(c, p - 1.0) * a0, tol));
    out.push_back(equality_report("scale_ap_w_" + tag, ap_constant(pw, fam.cubes()), c * a0, tol));
    const double ent_change = max_relative_change(ent0, entropy_lambda_table(ps, fam.cubes()), fam.cubes());
    CheckReport ent = make_report("scale_entropy_lambda_" + tag, ent_change, tol, 1.0);
    out.push_back(ent);
    if (orlicz) {
      const double orl_change =
          max_relative_change(orl0, orlicz_li_constant(ps, young, bump, fam.cubes()).lambda, fam.cubes());
      out.push_back(make_report("scale_orlicz_lambda_" + tag, orl_change, tol, 1.0));
    }
    // The nu route's lambda = psi(sigma_Q) must move under sigma scaling.
    const double nu_change = max_relative_change(nu0, psi_lambda_table(ps, bump, fam.cubes()), fam.cubes());
    CheckReport nu = make_report("scale_nu_lambda_changes_" + tag, nu_change, tol, std::nullopt);
    nu.bound = 1.0;
    nu.hard = true;
    nu.pass = nu_change > tol;
    out.push_back(nu);
  }
  return out;
}

int run_check(const CheckFlags& f) {
  static const std::set<std::string> suites{"lemmas", "cov", "scaling", "all"};
  if (!suites.count(f.suite)) throw usage_error("--suite must be one of lemmas, cov, scaling, all");
  if (f.trials < 1) throw usage_error("--trials must be at least 1");
  const BumpSpec bspec = load_bumps(f.bumps);
  const YoungSpec yspec = load_young(f.young);
  const Bump bump(bspec);
  std::map<double, Young> youngs;
  auto young_for = [&](double p) -> const Young& {
    auto it = youngs.find(p);
    if (it == youngs.end()) it = youngs.emplace(p, Young(yspec, p)).first;
    return it->second;
  };

  std::vector<CorpusEntry> corpus;
  if (!f.in.empty()) {
    corpus.push_back({f.in, f.seed, load_instance(f.in)});
  } else {
    corpus = random_corpus(f.trials, f.seed);
  }

  CsvTable t;
  t.echo("command", "check");
  t.echo("in", f.in.empty() ? "random" : f.in);
  t.echo("suite", f.suite);
  t.echo("trials", f.in.empty() ? std::to_string(f.trials) : "1");
  t.echo("seed", std::to_string(f.seed));
  t.echo("bumps", compact(to_json(bspec)));
  t.echo("young", compact(to_json(yspec)));
  t.columns = {"instance", "seed", "name", "lhs", "rhs", "bound", "ratio", "pass", "hard"};
  std::set<std::string> offenders;
  for (const CorpusEntry& e : corpus) {
    std::vector<CheckReport> reports;
    auto add = [&](std::vector<CheckReport> v) { reports.insert(reports.end(), v.begin(), v.end()); };
    if (f.suite == "lemmas" || f.suite == "all") add(lemma_suite(e.inst, bump));
    if (f.suite == "cov" || f.suite == "all") add(cov_suite(e.inst, e.seed));
    if (f.suite == "scaling" || f.suite == "all") add(scaling_suite(e.inst, bump, young_for(e.inst.p)));
    for (const CheckReport& r : reports) {
      std::vector<std::string> cells{e.label, std::to_string(e.seed)};
      for (std::string& c : csv_row(r)) cells.push_back(std::move(c));
      cells.push_back(r.hard ? "1" : "0");
      t.rows.push_back(std::move(cells));
      if (r.hard && !r.pass) offenders.insert(e.label + " (seed " + std::to_string(e.seed) + "): " + r.name);
    }
  }
  write_text(f.out, t.str());
  if (!offenders.empty()) {
    std::cerr << "hard-asserted checks failed:\n";
    for (const std::string& o : offenders) std::cerr << "  " << o << "\n";
    return kExitHardFailure;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// search

struct SearchFlags {
  std::string objective = "main_theorem";
  std::vector<int> depths{4};
  long steps = 1000;
  std::uint64_t seed = 0;
  double p = 2.0;
  double eta = 0.5;
  std::vector<std::string> strategies{"stopping_time"};
  std::string dist = "mixed";
  double t0 = 0.05;
  double gamma = 0.9995;
  int parallel = 1;
  std::string bumps;
  std::string young;
  bool timing = false;
  std::string out = "search.json";
  std::string csv;
};

int run_search(const SearchFlags& f) {
  ObjectiveSpec os;
  try {
    os.kind = parse_objective(f.objective);
  } catch (const std::invalid_argument& e) {
    throw usage_error(e.what());
  }
  os.bump = load_bumps(f.bumps);
  os.young = load_young(f.young);
  os.p = f.p;
  const Objective objective(os);
  SearchConfig c;
  c.eta = f.eta;
  c.strategies.clear();
  for (const std::string& s : f.strategies) c.strategies.push_back(SparseStrategy{parse_strategy(s)});
  c.distribution.kind = parse_distribution(f.dist);
  c.distribution.s = 1.5;
  c.distribution.mass = 0.9;
  c.steps = f.steps;
  c.t0 = f.t0;
  c.gamma = f.gamma;
  c.seed = f.seed;
  c.parallel = f.parallel;
  for (int d : f.depths) {
    c.depth = d;
    validate(c);
  }
  const SweepResult sweep = depth_sweep(objective, c, f.depths, f.timing);

  json cfg = to_json(c);
  cfg.erase("depth");
  json depths = f.depths;
  json doc{{"command", "search"},
           {"objective", {{"kind", f.objective}, {"p", f.p}, {"bumps", to_json(os.bump)}, {"young", to_json(os.young)}}},
           {"depths", depths},
           {"config", cfg},
           {"results", json::array()}};
  bool all_verified = true;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    json r = to_json(sweep.runs[i]);
    r["depth"] = f.depths[i];
    doc["results"].push_back(r);
    all_verified = all_verified && sweep.runs[i].reverified;
  }
  write_text(f.out, doc.dump(1) + "\n");

  CsvTable t = sweep_table(sweep.rows);
  t.echo("command", "search");
  t.echo("objective", f.objective);
  t.echo("p", fmt17(f.p));
  t.echo("seed", std::to_string(f.seed));
  t.echo("steps", std::to_string(f.steps));
  t.echo("config", compact(cfg));
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    t.echo("sub_ap_fraction_depth" + std::to_string(f.depths[i]), fmt17(sweep.runs[i].sub_ap_fraction));
  }
  std::string csv = f.csv;
  if (csv.empty()) {
    csv = f.out;
    if (csv.size() > 5 && csv.substr(csv.size() - 5) == ".json") csv.resize(csv.size() - 5);
    csv += ".csv";
    if (f.out == "-") csv = "-";
  }
  write_text(csv, t.str());
  if (!all_verified) {
    std::cerr << "best instance failed re-verification\n";
    return kExitHardFailure;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportFlags {
  std::vector<std::string> in;
  std::string format = "csv";
  std::string out = "-";
};

int run_report(const ReportFlags& f) {
  if (f.in.empty()) throw usage_error("report: at least one --in file is required");
  if (f.format != "csv" && f.format != "md") throw usage_error("--format must be 'csv' or 'md'");
  std::vector<std::string> columns;
  struct Entry {
    std::string file, seed, hash;
    std::map<std::string, std::string> cells;
  };
  std::vector<Entry> entries;
  for (const std::string& path : f.in) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    const CsvTable t = parse_csv(ss.str(), path);
    std::string seed, header_text;
    for (const auto& [k, v] : t.header) {
      if (k == "seed") seed = v;
      header_text += k + "=" + v + "\n";
    }
    if (std::find(t.columns.begin(), t.columns.end(), "") != t.columns.end()) {
      throw schema_error(path + ": empty column name");
    }
    for (const std::string& c : t.columns) {
      if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
    }
    const std::string hash = hex64(fnv1a(header_text));
    for (const auto& r : t.rows) {
      Entry e{path, seed, hash, {}};
      for (std::size_t i = 0; i < r.size(); ++i) e.cells[t.columns[i]] = r[i];
      entries.push_back(std::move(e));
    }
  }
  // Deduplicate on everything but the file name; kept rows count their copies.
  std::map<std::vector<std::string>, std::pair<std::size_t, int>> seen;
  std::vector<std::vector<std::string>> keys;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::vector<std::string> key{entries[i].seed, entries[i].hash};
    for (const std::string& c : columns) {
      auto it = entries[i].cells.find(c);
      key.push_back(it == entries[i].cells.end() ? "" : it->second);
    }
    auto [it, fresh] = seen.emplace(key, std::pair{i, 0});
    ++it->second.second;
    if (fresh) keys.push_back(key);
  }
  CsvTable out;
  out.echo("command", "report");
  std::string inputs;
  for (const std::string& p : f.in) inputs += (inputs.empty() ? "" : ";") + p;
  out.echo("in", inputs);
  out.columns = {"file", "seed", "config_hash"};
  out.columns.insert(out.columns.end(), columns.begin(), columns.end());
  out.columns.push_back("duplicates");
  for (const auto& key : keys) {
    const auto& [first, count] = seen.at(key);
    std::vector<std::string> row{entries[first].file};
    row.insert(row.end(), key.begin(), key.end());
    row.push_back(std::to_string(count - 1));
    out.rows.push_back(std::move(row));
  }
  if (f.format == "csv") {
    write_text(f.out, out.str());
    return 0;
  }
  std::ostringstream md;
  for (const auto& [k, v] : out.header) md << "<!-- " << k << "=" << v << " -->\n";
  std::vector<std::vector<std::string>> rows = out.rows;
  std::sort(rows.begin(), rows.end());
  auto line = [&](const std::vector<std::string>& cells) {
    md << "|";
    for (const std::string& c : cells) md << " " << c << " |";
    md << "\n";
  };
  line(out.columns);
  line(std::vector<std::string>(out.columns.size(), "---"));
  for (const auto& r : rows) line(r);
  write_text(f.out, md.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-weight sparse bump toolkit on finite dyadic trees"};
  app.require_subcommand(1);

  GenFlags gen;
  CLI::App* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--depth", gen.depth, "Tree depth L (2^L leaves)")->required();
  g->add_option("--strategy", gen.strategy, "tower | random_greedy | all_above_level | stopping_time");
  g->add_option("--level", gen.level, "Cut level for all_above_level (default: deepest feasible)");
  g->add_option("--eta", gen.eta, "Sparseness parameter in (0,1]");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--dist", gen.dist, "lognormal | spike | mixed");
  g->add_option("--mu", gen.mu, "lognormal location");
  g->add_option("--s", gen.s, "lognormal scale");
  g->add_option("--mass", gen.mass, "spike mass fraction");
  g->add_option("--support", gen.support, "spike support fraction");
  g->add_option("--p", gen.p, "Exponent p > 1");
  g->add_option("--out", gen.out, "Output file (- for stdout)");

  ConstantsFlags con;
  CLI::App* c = app.add_subcommand("constants", "Compute testing and bump constants of an instance");
  c->add_option("--in", con.in, "Instance JSON")->required();
  c->add_option("--bumps", con.bumps, "Bump specification JSON (default psi, phi)");
  c->add_option("--young", con.young, "Young function JSON (default t^p / log^2(e+t))");
  c->add_option("--cubes", con.cubes, "all | sparse");
  c->add_option("--out", con.out, "Output CSV (- for stdout)");

  CheckFlags chk;
  CLI::App* k = app.add_subcommand("check", "Run the inequality checks on an instance or a random corpus");
  k->add_option("--in", chk.in, "Instance JSON (default: random corpus)");
  k->add_option("--suite", chk.suite, "lemmas | cov | scaling | all");
  k->add_option("--trials", chk.trials, "Random corpus size");
  k->add_option("--seed", chk.seed, "Corpus seed");
  k->add_option("--bumps", chk.bumps, "Bump specification JSON");
  k->add_option("--young", chk.young, "Young function JSON");
  k->add_option("--out", chk.out, "Output CSV (- for stdout)");

  SearchFlags srch;
  CLI::App* s = app.add_subcommand("search", "Anneal for extremal instances of a ratio objective");
  s->add_option("--objective", srch.objective,
                "main_theorem | conjecture_nc | conjecture_sepcon | maximal_bound | prop31_orlicz | prop31_entropy");
  s->add_option("--depths", srch.depths, "Depths to sweep")->delimiter(',');
  s->add_option("--steps", srch.steps, "Annealing steps per depth");
  s->add_option("--seed", srch.seed, "Search seed");
  s->add_option("--p", srch.p, "Exponent p > 1");
  s->add_option("--eta", srch.eta, "Sparseness parameter");
  s->add_option("--strategies", srch.strategies, "Strategy pool")->delimiter(',');
  s->add_option("--dist", srch.dist, "lognormal | spike | mixed");
  s->add_option("--t0", srch.t0, "Initial temperature");
  s->add_option("--gamma", srch.gamma, "Geometric cooling factor");
  s->add_option("--parallel", srch.parallel, "Candidates evaluated per step");
  s->add_option("--bumps", srch.bumps, "Bump specification JSON");
  s->add_option("--young", srch.young, "Young function JSON");
  s->add_flag("--timing", srch.timing, "Record wall time in the depth CSV");
  s->add_option("--out", srch.out, "SearchResult JSON");
  s->add_option("--csv", srch.csv, "Depth CSV (default: --out with .csv)");

  ReportFlags rep;
  CLI::App* r = app.add_subcommand("report", "Merge result CSVs with provenance columns");
  r->add_option("--in", rep.in, "Result CSV files");
  r->add_option("--format", rep.format, "csv | md");
  r->add_option("--out", rep.out, "Output file (- for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen);
    if (c->parsed()) return run_constants(con);
    if (k->parsed()) return run_check(chk);
    if (s->parsed()) return run_search(srch);
    if (r->parsed()) return run_report(rep);
  } catch (const inadmissible_bump& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
