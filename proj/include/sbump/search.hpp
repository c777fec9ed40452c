#pragma once

// Extremal-instance search: ratio objectives, seeded random instances,
// simulated annealing over leaf log-densities and depth sweeps.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sbump/bump_functions.hpp"
#include "sbump/constants.hpp"
#include "sbump/dyadic.hpp"
#include "sbump/instance.hpp"
#include "sbump/numeric.hpp"
#include "sbump/testing.hpp"
#include "sbump/young.hpp"

namespace sbump {

enum class ObjectiveKind { main_theorem, conjecture_nc, conjecture_sepcon, maximal_bound, prop31_orlicz, prop31_entropy };

inline std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::main_theorem: return "main_theorem";
    case ObjectiveKind::conjecture_nc: return "conjecture_nc";
    case ObjectiveKind::conjecture_sepcon: return "conjecture_sepcon";
    case ObjectiveKind::maximal_bound: return "maximal_bound";
    case ObjectiveKind::prop31_orlicz: return "prop31_orlicz";
    case ObjectiveKind::prop31_entropy: return "prop31_entropy";
  }
  return "unknown";
}

inline ObjectiveKind parse_objective(const std::string& s) {
  for (ObjectiveKind k : {ObjectiveKind::main_theorem, ObjectiveKind::conjecture_nc, ObjectiveKind::conjecture_sepcon,
                          ObjectiveKind::maximal_bound, ObjectiveKind::prop31_orlicz, ObjectiveKind::prop31_entropy}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown objective '" + s + "'");
}

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::main_theorem;
  BumpSpec bump;
  YoungSpec young;
  double p = 2.0;
  /// Random trials for the maximal-operator lower bound.
  int maximal_budget = 4;
};

/// An objective with its bump and Young function built once.
///
/// Numerators are testing_constant (maximal_norm_lower for maximal_bound).
/// Denominators:
///   main_theorem       [w,sigma]_{nu_p}^{1/p} over S
///   conjecture_nc      sup_Q w_Q^{1/p} sigma_Q^{1/p'} psi(sigma_Q)^{1/p} over all cubes
///   conjecture_sepcon  sup_Q w_Q^{1/p} ||sigma^{1/p'}||_{Abar,Q} over all cubes
///   maximal_bound      as conjecture_nc
///   prop31_orlicz      the Orlicz constant with Luxemburg lambda, over S
///   prop31_entropy     the entropy constant, over S
/// They are computed by direct loops over leaves, independently of the
/// precomputed average tables used by the bump-constant functions.
class Objective {
 public:
  explicit Objective(ObjectiveSpec spec) : spec_(std::move(spec)), bump_(spec_.bump) {
    if (!(spec_.p > 1.0)) throw std::domain_error("objective: p must exceed 1");
    if (spec_.kind == ObjectiveKind::conjecture_sepcon || spec_.kind == ObjectiveKind::prop31_orlicz) {
      young_.emplace(spec_.young, spec_.p);
      if (!young_->bp_integral(spec_.p).finite) {
        throw precondition_error("objective: Young function violates the B_p condition");
      }
    }
  }

  [[nodiscard]] const ObjectiveSpec& spec() const { return spec_; }
  [[nodiscard]] ObjectiveKind kind() const { return spec_.kind; }
  [[nodiscard]] double p() const { return spec_.p; }
  [[nodiscard]] const Bump& bump() const { return bump_; }

  [[nodiscard]] double numerator(const WeightPair& pair, const SparseFamily& fam, std::uint64_t seed = 0) const {
    if (spec_.kind == ObjectiveKind::maximal_bound) return maximal_norm_lower(pair, spec_.maximal_budget, seed);
    return testing_constant(pair, fam).value;
  }

  [[nodiscard]] double denominator(const WeightPair& pair, const SparseFamily& fam) const {
    const TreeGeometry& g = pair.geometry();
    const double p = pair.p();
    const double pc = pair.p_conjugate();
    const std::span<const double> w = pair.w();
    const std::span<const double> sg = pair.sigma();
    auto avg = [&](std::span<const double> v, const CubeId& q) {
      return pairwise_sum(v.subspan(g.first_leaf(q), g.leaf_count(q))) / static_cast<double>(g.leaf_count(q));
    };
    auto over = [&](const std::vector<CubeId>& cubes, auto&& term) {
      double best = -kInf;
      for (const CubeId& q : cubes) best = std::max(best, term(q));
      return best;
    };
    switch (spec_.kind) {
      case ObjectiveKind::main_theorem:
        return std::pow(over(fam.cubes(),
                             [&](const CubeId& q) {
                               const double s = avg(sg, q);
                               return avg(w, q) * std::pow(s, p - 1.0) * bump_.nu(p, s);
                             }),
                        1.0 / p);
      case ObjectiveKind::conjecture_nc:
      case ObjectiveKind::maximal_bound:
        return over(all_cubes(g), [&](const CubeId& q) {
          const double s = avg(sg, q);
          return std::pow(avg(w, q), 1.0 / p) * std::pow(s, 1.0 / pc) * std::pow(bump_.psi(s), 1.0 / p);
        });
      case ObjectiveKind::conjecture_sepcon: {
        const std::vector<double> root = detail::powered(sg, 1.0 / pc);
        const Complementary bar{*young_};
        return over(all_cubes(g), [&](const CubeId& q) {
          return std::pow(avg(w, q), 1.0 / p) * luxemburg_norm(g, root, q, bar);
        });
      }
      case ObjectiveKind::prop31_orlicz: {
        const std::vector<double> root = detail::powered(sg, 1.0 / p);
        return over(fam.cubes(), [&](const CubeId& q) {
          const double norm = luxemburg_norm(g, root, q, *young_);
          const double s = avg(sg, q);
          const double lambda = s / std::pow(norm, p);
          return std::pow(avg(w, q), 1.0 / p) * (s / norm) * std::pow(bump_.phi(std::max(1.0, lambda)), 1.0 / pc);
        });
      }
      case ObjectiveKind::prop31_entropy:
        return over(fam.cubes(), [&](const CubeId& q) {
          // lambda_Q by a per-leaf walk up to Q.
          const std::size_t first = g.first_leaf(q);
          const std::size_t n = g.leaf_count(q);
          std::vector<double> m(n);
          for (std::size_t i = 0; i < n; ++i) {
            double best = 0.0;
            for (CubeId c = g.leaf(first + i);; c = c.parent()) {
              best = std::max(best, avg(sg, c));
              if (c == q) break;
            }
            m[i] = best;
          }
          const double s = avg(sg, q);
          const double lambda = pairwise_sum(m) / static_cast<double>(n) / s;
          return std::pow(avg(w, q), 1.0 / p) * std::pow(s, 1.0 / pc) * std::pow(lambda, 1.0 / p) *
                 bump_.phi(std::max(1.0, lambda));
        });
    }
    return 0.0;
  }

  /// The same denominator through the bump-constant functions.
  [[nodiscard]] double denominator_reference(const WeightPair& pair, const SparseFamily& fam) const {
    const std::vector<CubeId> every = all_cubes(pair.geometry());
    switch (spec_.kind) {
      case ObjectiveKind::main_theorem: return std::pow(nu_constant(pair, bump_, fam.cubes()), 1.0 / pair.p());
      case ObjectiveKind::conjecture_nc:
      case ObjectiveKind::maximal_bound: return maximal_bound_constant(pair, bump_, every);
      case ObjectiveKind::conjecture_sepcon: return separated_bump_constant(pair, *young_, every);
      case ObjectiveKind::prop31_orlicz: return orlicz_li_constant(pair, *young_, bump_, fam.cubes()).value;
      case ObjectiveKind::prop31_entropy: return entropy_constant(pair, bump_, fam.cubes());
    }
    return 0.0;
  }

  [[nodiscard]] double evaluate(const WeightPair& pair, const SparseFamily& fam, std::uint64_t seed = 0) const {
    if (std::abs(pair.p() - spec_.p) > 1e-12) throw std::domain_error("evaluate: instance p differs from objective p");
    const double den = denominator(pair, fam);
    if (!(den >= 1e-300)) throw numeric_error("evaluate: denominator below 1e-300");
    return numerator(pair, fam, seed) / den;
  }

  [[nodiscard]] double evaluate(const Instance& inst) const { return evaluate(inst.pair(), inst.family()); }

 private:
  ObjectiveSpec spec_;
  Bump bump_;
  std::optional<Young> young_;
};

struct SearchConfig {
  int depth = 4;
  double eta = 0.5;
  std::vector<SparseStrategy> strategies{SparseStrategy{SparseStrategy::Kind::stopping_time}};
  LeafDistribution distribution;
  long steps = 1000;
  double t0 = 0.05;
  double gamma = 0.9995;
  std::uint64_t seed = 0;
  int parallel = 1;
};

inline void validate(const SearchConfig& c) {
  TreeGeometry{c.depth};
  if (!(c.eta > 0.0 && c.eta <= 1.0)) throw std::domain_error("search: eta must lie in (0,1]");
  if (c.strategies.empty()) throw std::domain_error("search: empty strategy pool");
  if (c.steps < 1) throw std::domain_error("search: steps must be at least 1");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw std::domain_error("search: gamma must lie in (0,1)");
  if (!(c.t0 > 0.0)) throw std::domain_error("search: initial temperature must be positive");
  if (c.parallel < 1) throw std::domain_error("search: parallel width must be at least 1");
}

/// Leaves from the configured distribution and a family from a strategy
/// drawn out of the pool; deterministic per seed.
inline Instance random_instance(const SearchConfig& config, double p, std::uint64_t seed) {
  validate(config);
  const TreeGeometry g(config.depth);
  Rng rng(seed);
  LeafPair leaves = draw_leaves(g, config.distribution, rng);
  const SparseStrategy strategy = config.strategies[rng.below(config.strategies.size())];
  return make_instance(config.depth, p, std::move(leaves.w), std::move(leaves.sigma),
                       SparseRecipe{strategy, config.eta, rng.next()});
}

/// Fraction of family cubes with w_Q sigma_Q^{p-1} < 1.
inline double sub_ap_fraction(const Instance& inst) {
  const WeightPair pair = inst.pair();
  std::size_t count = 0;
  for (const CubeId& q : inst.cubes) {
    if (pair.w_avg(q) * std::pow(pair.sigma_avg(q), pair.p() - 1.0) < 1.0) ++count;
  }
  return inst.cubes.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(inst.cubes.size());
}

struct SearchResult {
  std::string objective;
  double best_ratio = -kInf;
  Instance best;
  /// Running maximum after each step.
  std::vector<double> trace;
  long evaluations = 0;
  double sub_ap_fraction = 0.0;
  bool reverified = false;
  double reverify_error = 0.0;
};

namespace detail {

inline constexpr double kLogDensityClamp = 27.631021115928547;  // ln 1e12

struct Proposal {
  bool on_sigma = false;
  CubeId cube;
  std::vector<double> steps;
};

inline Instance apply_proposal(const Instance& cur, const Proposal& prop) {
  Instance next = cur;
  std::vector<double>& v = prop.on_sigma ? next.sigma : next.w;
  const TreeGeometry g(cur.depth);
  const std::size_t first = g.first_leaf(prop.cube);
  for (std::size_t i = 0; i < prop.steps.size(); ++i) {
    const double u = std::clamp(std::log(v[first + i]) + prop.steps[i], -kLogDensityClamp, kLogDensityClamp);
    v[first + i] = std::exp(u);
  }
  return next;
}

inline void refresh_stopping_family(Instance& inst) {
  if (!inst.recipe || inst.recipe->strategy.kind != SparseStrategy::Kind::stopping_time) return;
  inst.cubes = generate_sparse(inst.geometry(), inst.recipe->strategy, inst.recipe->eta, inst.recipe->seed, inst.sigma)
                   .cubes();
}

}  // namespace detail

/// Simulated annealing over leaf log-densities.
///
/// Each step proposes `parallel` candidates; a candidate picks w or sigma and
/// a uniformly random dyadic cube, and adds an independent N(0, 0.5^2) step to
/// the log-density of every leaf under that cube. The best candidate (first
/// in proposal order on ties) is accepted with probability min(1, exp(D/T)),
/// D the change in the objective, and T = t0 gamma^step. Every steps/10
/// steps the chain restarts from a fresh random instance; every steps/20
/// steps a stopping-time family is rebuilt from the current sigma. All draws
/// come from one generator seeded by config.seed, so the result does not
/// depend on the evaluation threads.
inline SearchResult anneal(const Objective& objective, const SearchConfig& config) {
  validate(config);
  const double p = objective.p();
  const TreeGeometry g(config.depth);
  Rng rng(config.seed);
  SearchResult result;
  result.objective = to_string(objective.kind());

  auto eval = [&](const Instance& inst) {
    ++result.evaluations;
    return objective.evaluate(inst);
  };

  Instance cur = random_instance(config, p, mix_seed(config.seed, 0));
  double cur_val = eval(cur);
  result.best = cur;
  result.best_ratio = cur_val;
  result.trace.push_back(cur_val);

  const long restart_every = std::max(1L, config.steps / 10);
  const long refresh_every = std::max(1L, config.steps / 20);
  double temperature = config.t0;
  const std::size_t width = static_cast<std::size_t>(config.parallel);

  for (long step = 1; step < config.steps; ++step) {
    temperature *= config.gamma;
    if (step % restart_every == 0) {
      cur = random_instance(config, p, mix_seed(config.seed, static_cast<std::uint64_t>(step)));
      cur_val = eval(cur);
    } else {
      if (step % refresh_every == 0 && cur.recipe &&
          cur.recipe->strategy.kind == SparseStrategy::Kind::stopping_time) {
        detail::refresh_stopping_family(cur);
        cur_val = eval(cur);
      }
      std::vector<Instance> cands;
      cands.reserve(width);
      for (std::size_t j = 0; j < width; ++j) {
        detail::Proposal prop;
        prop.on_sigma = rng.coin();
        prop.cube = CubeId::from_node(static_cast<std::size_t>(rng.below(g.cubes())));
        prop.steps.resize(g.leaf_count(prop.cube));
        for (double& s : prop.steps) s = 0.5 * rng.normal();
        cands.push_back(detail::apply_proposal(cur, prop));
      }
      std::vector<double> vals(width);
      if (width == 1) {
        vals[0] = objective.evaluate(cands[0]);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < width; ++j) {
          pool.emplace_back([&, j] { vals[j] = objective.evaluate(cands[j]); });
        }
        for (std::thread& t : pool) t.join();
      }
      result.evaluations += static_cast<long>(width);
      std::size_t pick = 0;
      for (std::size_t j = 1; j < width; ++j) {
        if (vals[j] > vals[pick]) pick = j;
      }
      const double delta = vals[pick] - cur_val;
      const double u = rng.uniform();
      if (delta >= 0.0 || u < std::exp(delta / temperature)) {
        cur = std::move(cands[pick]);
        cur_val = vals[pick];
      }
    }
    if (cur_val > result.best_ratio) {
      result.best_ratio = cur_val;
      result.best = cur;
    }
    result.trace.push_back(result.best_ratio);
  }

  // The stored best is self-contained: freeze its family as a cube list.
  result.best.recipe.reset();
  const double again = objective.evaluate(result.best);
  result.reverify_error = relative_error(again, result.best_ratio);
  result.reverified = result.reverify_error < 1e-9;
  result.sub_ap_fraction = sub_ap_fraction(result.best);
  return result;
}

struct SweepRow {
  int depth = 0;
  double best_ratio = 0.0;
  long evaluations = 0;
  double seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SearchResult> runs;
};

/// One anneal per depth, seeded by mix_seed(config.seed, depth). Wall time is
/// recorded only when `timing` is set so that the table stays reproducible.
inline SweepResult depth_sweep(const Objective& objective, const SearchConfig& config, const std::vector<int>& depths,
                               bool timing = false) {
  SweepResult out;
  for (int d : depths) {
    SearchConfig c = config;
    c.depth = d;
    c.seed = mix_seed(config.seed, static_cast<std::uint64_t>(d));
    const auto start = std::chrono::steady_clock::now();
    SearchResult r = anneal(objective, c);
    const double secs =
        timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
    out.rows.push_back({d, r.best_ratio, r.evaluations, secs});
    out.runs.push_back(std::move(r));
  }
  return out;
}

}  // namespace sbump
