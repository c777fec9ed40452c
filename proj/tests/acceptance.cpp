// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Tables produced along the way are written to the results directory.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "sbump/sbump.hpp"

using namespace sbump;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double x) { return fmt17(x); }

const SparseStrategy::Kind kStrategies[] = {SparseStrategy::Kind::tower, SparseStrategy::Kind::random_greedy,
                                            SparseStrategy::Kind::all_above_level,
                                            SparseStrategy::Kind::stopping_time};

/// Corpus instance i: cycles depth 2..8, all four strategies, both etas and
/// the three exponents; leaves from the mixed lognormal/spike distribution.
Instance corpus_instance(std::size_t i, std::uint64_t seed, int max_depth = 8, const double* p_override = nullptr) {
  SearchConfig c;
  c.depth = 2 + static_cast<int>(i % static_cast<std::size_t>(max_depth - 1));
  c.eta = (i / 4) % 2 ? 0.5 : 0.25;
  c.strategies = {SparseStrategy{kStrategies[i % 4]}};
  c.distribution.kind = LeafDistribution::Kind::mixed;
  c.distribution.s = 1.5;
  c.distribution.mass = 0.9;
  const double ps[] = {1.5, 2.0, 3.0};
  const double p = p_override ? *p_override : ps[(i / 8) % 3];
  return random_instance(c, p, mix_seed(seed, i));
}

std::vector<oracle::Cube> ocubes(const std::vector<CubeId>& v) {
  std::vector<oracle::Cube> out;
  for (const CubeId& q : v) out.push_back({q.level, q.index});
  return out;
}

bool rel_ok(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  const Instance inst = make_instance(2, 2.0, {1, 1, 1, 1}, {4, 1, 1, 1}, std::vector<CubeId>{{0, 0}, {1, 0}, {2, 0}});
  const WeightPair pair = inst.pair();
  const SparseFamily fam = inst.family();
  const std::vector<double> w = inst.w, s = inst.sigma;
  const auto oc = ocubes(fam.cubes());

  const double t = testing_constant(pair, fam).value;
  const double t_or = static_cast<double>(oracle::testing(2, oc, w, s, 2.0L));
  const double ap = ap_constant(pair);
  const double ap_or = static_cast<double>(oracle::ap(2, oracle::every_cube(2), w, s, 2.0L));
  const double ent = entropy_lambda(pair.geometry(), pair.sigma(), {0, 0});
  const double ent_or = static_cast<double>(oracle::entropy_lambda(2, s, {0, 0}));
  std::vector<double> a;
  for (const CubeId& q : fam.cubes()) a.push_back(pair.sigma_avg(q));
  const CovSides cov = cov_sides(pair.geometry(), fam.cubes(), a, pair.w(), 2.0);
  const double cov_lhs_or = static_cast<double>(oracle::power_integral(2, oracle::local_sum(2, oc, s, {0, 0}), w, 2.0L));
  const double hy = hytonen_ratio(fam, pair, {0, 0}).ratio;
  const double hy_or = cov_lhs_or / static_cast<double>(oracle::ap(2, oc, w, s, 2.0L) *
                                                         (oracle::mass(2, s, {0, 0}) + oracle::mass(2, s, {1, 0}) +
                                                          oracle::mass(2, s, {2, 0})));
  const double secs = seconds_since(t0);

  const double tol = 1e-9;
  bool ok = rel_ok(t, t_or, tol) && rel_ok(t, std::sqrt(23.0625 / 1.75), tol);
  ok = ok && rel_ok(ap, ap_or, tol) && rel_ok(ap, 4.0, tol);
  ok = ok && rel_ok(ent, ent_or, tol) && rel_ok(ent, 10.0 / 7.0, tol);
  ok = ok && rel_ok(cov.lhs * cov.lhs, cov_lhs_or, tol) && rel_ok(cov.lhs * cov.lhs, 23.0625, tol);
  ok = ok && rel_ok(cov.rhs * cov.rhs, 16.625, tol);
  ok = ok && rel_ok(hy, hy_or, tol) && rel_ok(hy, 23.0625 / 16.0, tol);
  ok = ok && secs < 1.0;
  verdict(1, ok,
          "testing=" + num(t) + " a_p=" + num(ap) + " lambda_root=" + num(ent) + " cov^2=(" + num(cov.lhs * cov.lhs) +
              "," + num(cov.rhs * cov.rhs) + ") hytonen=" + num(hy) + " seconds=" + num(secs));
}

void criterion2() {
  const auto t0 = Clock::now();
  const Bump bump{BumpSpec{}};
  const std::size_t n = 1200;
  long checks = 0, violations = 0;
  double worst32 = 0, worst33 = 0, worst_sawyer = 0;
  int strategies_seen = 0;
  bool seen[4] = {false, false, false, false};
  for (std::size_t i = 0; i < n; ++i) {
    const Instance inst = corpus_instance(i, 20261014);
    seen[i % 4] = true;
    const WeightPair pair = inst.pair();
    const SparseFamily fam = inst.family();
    const std::vector<int> ks = realized_levels(fam, pair.sigma());
    for (const CubeId& r : fam.cubes()) {
      for (int k : ks) {
        const CheckReport c = prop32_check(fam, pair.sigma(), r, k);
        ++checks;
        if (!c.pass) ++violations;
        worst32 = std::max(worst32, c.ratio / *c.bound);
      }
      const CheckReport c33 = prop33_check(fam, pair.sigma(), bump, r);
      const CheckReport cs = sawyer_sum_bound(pair, fam, bump, r);
      checks += 2;
      violations += !c33.pass + !cs.pass;
      worst33 = std::max(worst33, c33.ratio / *c33.bound);
      worst_sawyer = std::max(worst_sawyer, cs.ratio / *cs.bound);
    }
  }
  for (bool b : seen) strategies_seen += b;
  const double secs = seconds_since(t0);
  verdict(2, violations == 0 && strategies_seen == 4 && secs < 120.0,
          "instances=" + std::to_string(n) + " checks=" + std::to_string(checks) +
              " violations=" + std::to_string(violations) + " max_ratio/bound prop32=" + num(worst32) +
              " prop33=" + num(worst33) + " sawyer=" + num(worst_sawyer) + " seconds=" + num(secs));
}

void criterion3() {
  const std::size_t n = 1200;
  long violations = 0;
  long brackets = 0;
  double lo2 = kInf, hi2 = 0;
  const double two = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Instance inst = corpus_instance(i, 77, 8, &two);
    const WeightPair pair = inst.pair();
    const SparseFamily fam = inst.family();
    std::vector<double> a;
    for (const CubeId& q : fam.cubes()) a.push_back(pair.sigma_avg(q));
    Rng rng(mix_seed(78, i));
    std::vector<double> b(fam.size());
    for (double& x : b) x = std::exp(2.0 * rng.normal());
    for (const auto* coef : {&a, &b}) {
      const CovSides s = cov_sides(pair.geometry(), fam.cubes(), *coef, pair.w(), 2.0);
      const CheckReport r = cov_bracket_report("cov", s);
      ++brackets;
      if (!r.pass) ++violations;
      lo2 = std::min(lo2, r.ratio);
      hi2 = std::max(hi2, r.ratio);
    }
  }
  std::string other;
  for (double p : {1.5, 3.0}) {
    double lo = kInf, hi = 0;
    for (std::size_t i = 0; i < 600; ++i) {
      const Instance inst = corpus_instance(i, 79, 8, &p);
      const WeightPair pair = inst.pair();
      const SparseFamily fam = inst.family();
      std::vector<double> a;
      for (const CubeId& q : fam.cubes()) a.push_back(pair.sigma_avg(q));
      const CovSides s = cov_sides(pair.geometry(), fam.cubes(), a, pair.w(), p);
      lo = std::min(lo, s.lhs / s.rhs);
      hi = std::max(hi, s.lhs / s.rhs);
    }
    other += " p=" + num(p) + ":[" + num(lo) + "," + num(hi) + "]";
  }
  verdict(3, violations == 0,
          "p=2 brackets=" + std::to_string(brackets) + " violations=" + std::to_string(violations) + " ratio in [" +
              num(lo2) + "," + num(hi2) + "] (bound sqrt2); recorded lhs/rhs" + other);
}

void criterion4() {
  const Bump bump{BumpSpec{}};
  const double tol = 1e-10;
  long laws = 0, broken = 0, nu_unchanged = 0;
  double worst = 0;
  auto law = [&](double got, double want) {
    ++laws;
    const double e = relative_error(got, want);
    worst = std::max(worst, e);
    if (!(e <= tol)) ++broken;
  };
  for (std::size_t i = 0; i < 240; ++i) {
    const Instance inst = corpus_instance(i, 4040);
    const WeightPair pair = inst.pair();
    const SparseFamily fam = inst.family();
    const double p = pair.p(), pc = pair.p_conjugate();
    const Young young(YoungSpec{}, p);
    const double t = testing_constant(pair, fam).value;
    const double ap = ap_constant(pair);
    const OrliczResult orl = orlicz_li_constant(pair, young, bump, fam.cubes());
    const CubeTable ent = entropy_lambda_table(pair, fam.cubes());
    const CubeTable nu = psi_lambda_table(pair, bump, fam.cubes());
    for (double c : {1e-6, 1e6}) {
      const WeightPair ps = pair.scaled(1.0, c), pw = pair.scaled(c, 1.0);
      law(testing_constant(ps, fam).value, std::pow(c, 1.0 / pc) * t);
      law(testing_constant(pw, fam).value, std::pow(c, 1.0 / p) * t);
      law(ap_constant(ps), std::pow(c, p - 1.0) * ap);
      law(ap_constant(pw), c * ap);
      const OrliczResult orl_s = orlicz_li_constant(ps, young, bump, fam.cubes());
      const CubeTable ent_s = entropy_lambda_table(ps, fam.cubes());
      const CubeTable nu_s = psi_lambda_table(ps, bump, fam.cubes());
      bool changed = false;
      for (const CubeId& q : fam.cubes()) {
        law(orl_s.lambda[q.node()], orl.lambda[q.node()]);
        law(ent_s[q.node()], ent[q.node()]);
        changed = changed || relative_error(nu_s[q.node()], nu[q.node()]) > tol;
      }
      if (!changed) ++nu_unchanged;
    }
  }
  verdict(4, broken == 0 && nu_unchanged == 0,
          "laws=" + std::to_string(laws) + " broken=" + std::to_string(broken) + " worst_rel_err=" + num(worst) +
              " nu_table_unchanged=" + std::to_string(nu_unchanged));
}

double dense_norm(const WeightPair& pair, const SparseFamily& fam) {
  const int d = pair.geometry().depth;
  const std::vector<double> w(pair.w().begin(), pair.w().end()), s(pair.sigma().begin(), pair.sigma().end());
  const auto m = oracle::sparse_matrix(d, ocubes(fam.cubes()), s);
  const std::size_t n = m.size();
  const double h = std::ldexp(1.0, -d);
  Eigen::MatrixXd a(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          std::sqrt(w[x] * h) * static_cast<double>(m[x][y]) / std::sqrt(s[y] * h);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
  return std::sqrt(eig.eigenvalues().maxCoeff());
}

void criterion5() {
  const double two = 2.0;
  double worst = 0;
  long lower_bad = 0, testing_bad = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const Instance inst = corpus_instance(i, 5005, 6, &two);
    const WeightPair pair = inst.pair();
    const SparseFamily fam = inst.family();
    const double v = operator_norm_p2(fam, pair);
    worst = std::max(worst, relative_error(v, dense_norm(pair, fam)));
    if (!(operator_norm_lower(fam, pair, 8, i) <= v + 1e-9)) ++lower_bad;
    const double tmax = std::max(testing_constant(pair, fam).value, testing_constant(pair.dual(), fam).value);
    if (!(tmax <= v + 1e-9)) ++testing_bad;
  }
  verdict(5, worst <= 1e-6 && lower_bad == 0 && testing_bad == 0,
          "instances=100 max_rel_err_vs_eigensolve=" + num(worst) + " lower_violations=" + std::to_string(lower_bad) +
              " testing_violations=" + std::to_string(testing_bad));
}

void criterion6(const fs::path& results) {
  const std::vector<int> depths{4, 5, 6, 7, 8};
  CsvTable table;
  table.echo("objective", "main_theorem");
  table.echo("seed", "2026");
  table.echo("steps", "10000");
  table.columns = {"p", "depth", "best_ratio", "evaluations", "sub_ap_fraction"};
  bool ok = true;
  std::string detail;
  for (double p : {1.5, 2.0, 3.0}) {
    ObjectiveSpec spec;
    spec.kind = ObjectiveKind::main_theorem;
    spec.p = p;
    const Objective obj(spec);
    SearchConfig c;
    c.steps = 10000;
    c.seed = 2026;
    c.eta = 0.5;
    c.distribution.kind = LeafDistribution::Kind::mixed;
    c.distribution.s = 1.5;
    c.distribution.mass = 0.9;
    c.strategies = {SparseStrategy{SparseStrategy::Kind::stopping_time}, SparseStrategy{SparseStrategy::Kind::tower},
                    SparseStrategy{SparseStrategy::Kind::random_greedy},
                    SparseStrategy{SparseStrategy::Kind::all_above_level}};
    const SweepResult s = depth_sweep(obj, c, depths);
    long min_evals = s.rows.front().evaluations;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const SweepRow& r = s.rows[i];
      min_evals = std::min(min_evals, r.evaluations);
      table.rows.push_back({fmt17(p), std::to_string(r.depth), fmt17(r.best_ratio), std::to_string(r.evaluations),
                            fmt17(s.runs[i].sub_ap_fraction)});
    }
    const double growth = s.rows.back().best_ratio / s.rows.front().best_ratio - 1.0;
    const bool row_ok = growth < 0.25 && min_evals >= 10000;
    ok = ok && row_ok;
    detail += " p=" + num(p) + ": r(4)=" + num(s.rows.front().best_ratio) + " r(8)=" + num(s.rows.back().best_ratio) +
              " growth=" + num(growth) + (row_ok ? "" : " [over]");
  }
  write_text((results / "depth_sweep_main_theorem.csv").string(), table.str());
  verdict(6, ok, detail.substr(1));
}

void criterion7(const fs::path& results) {
  double worst = 0;
  CsvTable table;
  table.echo("seed", "707");
  table.columns = {"depth", "s", "max_ratio", "instances"};
  std::vector<std::vector<double>> maxima(9, std::vector<double>(3, 0.0));
  std::vector<int> count(9, 0);
  const double ss[] = {0.25, 0.5, 0.75};
  for (std::size_t i = 0; i < 700; ++i) {
    const Instance inst = corpus_instance(i, 707);
    const SparseFamily fam = inst.family();
    ++count[static_cast<std::size_t>(inst.depth)];
    for (double c : {1e-6, 10.0, 1e6}) {
      std::vector<double> wc = inst.w;
      for (double& x : wc) x *= c;
      for (int j = 0; j < 3; ++j) {
        for (const CubeId& r : fam.cubes()) {
          const double a = carleson_embedding_ratio(fam, inst.w, ss[j], r).ratio;
          const double b = carleson_embedding_ratio(fam, wc, ss[j], r).ratio;
          worst = std::max(worst, relative_error(b, a));
          if (c == 10.0) {
            double& m = maxima[static_cast<std::size_t>(inst.depth)][static_cast<std::size_t>(j)];
            m = std::max(m, a);
          }
        }
      }
    }
  }
  std::string trend;
  for (int d = 2; d <= 8; ++d) {
    for (int j = 0; j < 3; ++j) {
      table.rows.push_back({std::to_string(d), fmt17(ss[j]), fmt17(maxima[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)]),
                            std::to_string(count[static_cast<std::size_t>(d)])});
    }
  }
  write_text((results / "carleson_trend.csv").string(), table.str());
  std::printf("  carleson trend (depth: max ratio at s=0.25, 0.5, 0.75)\n");
  for (int d = 2; d <= 8; ++d) {
    const auto& m = maxima[static_cast<std::size_t>(d)];
    std::printf("    %d: %.6g %.6g %.6g\n", d, m[0], m[1], m[2]);
  }
  verdict(7, worst <= 1e-12, "max_rel_change_under_w_scaling=" + num(worst) + " (trend table in results/carleson_trend.csv)");
}

void criterion8() {
  bool ok = true;
  std::string detail;
  for (auto fu : {LogBump::Family::log_power, LogBump::Family::log_loglog}) {
    for (auto fl : {LogBump::Family::log_power, LogBump::Family::log_loglog}) {
      BumpSpec s;
      s.psi.upper = {fu, 1.0};
      s.psi.lower = {fl, 1.0};
      const BumpAdmissibility r = check_bump(s);
      ok = ok && r.admissible && std::isfinite(r.s_psi);
      detail += to_string(fu) + "/" + to_string(fl) + ":S_psi=" + num(r.s_psi) + " ";
    }
  }
  BumpSpec bad;
  bad.psi.lower = {LogBump::Family::log_power, 0.0};
  const BumpAdmissibility r = check_bump(bad);
  bool threw = false;
  try {
    const Bump b(bad);
  } catch (const inadmissible_bump&) {
    threw = true;
  }
  ok = ok && !r.admissible && !r.psi_tail_finite && threw;
  detail += "log(e+1/t) rejected=" + std::string(!r.admissible && threw ? "yes" : "no");
  verdict(8, ok, detail);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion9() {
  const fs::path work = fs::temp_directory_path() / "sbump_acceptance_determinism";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cli = SBUMP_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  bool ok = true;
  std::vector<std::string> compared;
  for (const char* tag : {"a", "b"}) {
    const std::string t = tag;
    const fs::path inst = work / ("inst_" + t + ".json");
    ok = ok && run("gen --depth 6 --strategy stopping_time --eta 0.5 --seed 11 --dist mixed --out " + inst.string()) == 0;
    ok = ok && run("constants --in " + (work / "inst_a.json").string() + " --cubes all --out " +
                   (work / ("const_" + t + ".csv")).string()) == 0;
    ok = ok && run("check --trials 20 --seed 4 --suite all --out " + (work / ("check_" + t + ".csv")).string()) == 0;
    ok = ok && run("search --objective main_theorem --depths 3,5 --steps 200 --seed 9 --parallel 2 --out " +
                   (work / ("search_" + t + ".json")).string()) == 0;
  }
  for (const char* stem : {"inst_%s.json", "const_%s.csv", "check_%s.csv", "search_%s.json", "search_%s.csv"}) {
    char a[64], b[64];
    std::snprintf(a, sizeof a, stem, "a");
    std::snprintf(b, sizeof b, stem, "b");
    const std::string ta = slurp(work / a), tb = slurp(work / b);
    const bool same = !ta.empty() && ta == tb;
    ok = ok && same;
    compared.push_back(std::string(a) + (same ? "=" : "!="));
  }
  std::string detail = "artifacts:";
  for (const std::string& c : compared) detail += " " + c;
  verdict(9, ok, detail);
}

}  // namespace

int main() {
  const fs::path results = SBUMP_RESULTS_DIR;
  fs::create_directories(results);
  const std::vector<std::function<void()>> steps{
      criterion1, criterion2, criterion3, criterion4, criterion5, [&] { criterion6(results); },
      [&] { criterion7(results); }, criterion8, criterion9};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("criterion raised: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
