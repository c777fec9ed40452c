#pragma once

// A complete problem instance: tree depth, exponent, leaf densities and a
// sparse family, either as a generation recipe or as an explicit cube list.
// Also the seeded leaf distributions shared by the generator and the search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbump/dyadic.hpp"
#include "sbump/numeric.hpp"

namespace sbump {

struct SparseRecipe {
  SparseStrategy strategy;
  double eta = 0.5;
  std::uint64_t seed = 0;
};

struct Instance {
  int depth = 0;
  double p = 2.0;
  std::vector<double> w;
  std::vector<double> sigma;
  /// Present when the family is regenerated from a recipe.
  std::optional<SparseRecipe> recipe;
  /// The resolved family, sorted by (level, index).
  std::vector<CubeId> cubes;
  /// Number of leaf values raised to the density floor on construction.
  std::size_t clamped = 0;

  [[nodiscard]] TreeGeometry geometry() const { return TreeGeometry(depth); }
  [[nodiscard]] WeightPair pair() const { return WeightPair(geometry(), w, sigma, p); }
  [[nodiscard]] SparseFamily family() const {
    const double eta = recipe ? recipe->eta : 1.0;
    return SparseFamily(geometry(), cubes, eta);
  }
};

namespace detail {

inline std::size_t clamp_checked(std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::domain_error(std::string(what) + ": leaf densities must be finite and nonnegative");
    }
  }
  return clamp_leaves(v);
}

}  // namespace detail

/// Builds an instance from a recipe, clamping the densities first.
inline Instance make_instance(int depth, double p, std::vector<double> w, std::vector<double> sigma,
                              const SparseRecipe& recipe) {
  const TreeGeometry g(depth);
  require_leaves(g, w, "instance w");
  require_leaves(g, sigma, "instance sigma");
  Instance inst;
  inst.depth = depth;
  inst.p = p;
  inst.clamped = detail::clamp_checked(w, "instance w") + detail::clamp_checked(sigma, "instance sigma");
  inst.w = std::move(w);
  inst.sigma = std::move(sigma);
  inst.recipe = recipe;
  inst.cubes = generate_sparse(g, recipe.strategy, recipe.eta, recipe.seed, inst.sigma).cubes();
  return inst;
}

/// Builds an instance with an explicit family.
inline Instance make_instance(int depth, double p, std::vector<double> w, std::vector<double> sigma,
                              std::vector<CubeId> cubes) {
  const TreeGeometry g(depth);
  require_leaves(g, w, "instance w");
  require_leaves(g, sigma, "instance sigma");
  if (cubes.empty()) throw std::domain_error("instance: empty family");
  Instance inst;
  inst.depth = depth;
  inst.p = p;
  inst.clamped = detail::clamp_checked(w, "instance w") + detail::clamp_checked(sigma, "instance sigma");
  inst.w = std::move(w);
  inst.sigma = std::move(sigma);
  inst.cubes = SparseFamily(g, std::move(cubes)).cubes();
  return inst;
}

struct LeafDistribution {
  enum class Kind { lognormal, spike, mixed };
  Kind kind = Kind::lognormal;
  double mu = 0.0;
  double s = 1.0;
  /// spike: share of the sigma mass carried by the support block E.
  double mass = 1.0;
  /// spike: |E| as a fraction of [0,1), rounded down to a power of two.
  double support = 0.25;
};

inline std::string to_string(LeafDistribution::Kind k) {
  switch (k) {
    case LeafDistribution::Kind::lognormal: return "lognormal";
    case LeafDistribution::Kind::spike: return "spike";
    case LeafDistribution::Kind::mixed: return "mixed";
  }
  return "unknown";
}

inline LeafDistribution::Kind parse_distribution(const std::string& s) {
  if (s == "lognormal") return LeafDistribution::Kind::lognormal;
  if (s == "spike") return LeafDistribution::Kind::spike;
  if (s == "mixed") return LeafDistribution::Kind::mixed;
  throw std::invalid_argument("unknown leaf distribution '" + s + "'");
}

struct LeafPair {
  std::vector<double> w;
  std::vector<double> sigma;
};

inline std::vector<double> lognormal_leaves(const TreeGeometry& g, double mu, double s, Rng& rng) {
  std::vector<double> v(g.leaves());
  for (double& x : v) x = std::exp(mu + s * rng.normal());
  return v;
}

/// sigma = mass/|E| on a random aligned dyadic block E and (1-mass)/(1-|E|)
/// elsewhere (floored at the density floor); w lognormal(0, 1).
inline LeafPair spike_leaves(const TreeGeometry& g, double mass, double support, Rng& rng) {
  if (!(support > 0.0 && support <= 1.0)) throw std::domain_error("spike: support fraction must lie in (0,1]");
  if (!(mass >= 0.0 && mass <= 1.0)) throw std::domain_error("spike: mass fraction must lie in [0,1]");
  const std::size_t n = g.leaves();
  std::size_t block = 1;
  while (block * 2 <= n && static_cast<double>(block * 2) <= support * static_cast<double>(n)) block *= 2;
  const double f = static_cast<double>(block) / static_cast<double>(n);
  const std::size_t start = block * rng.below(n / block);
  const double on = mass / f;
  const double off = f < 1.0 ? (1.0 - mass) / (1.0 - f) : 0.0;
  LeafPair out;
  out.sigma.assign(n, std::max(off, kDensityFloor));
  for (std::size_t i = start; i < start + block; ++i) out.sigma[i] = std::max(on, kDensityFloor);
  out.w = lognormal_leaves(g, 0.0, 1.0, rng);
  return out;
}

/// Draws (w, sigma) from the distribution; the mixed kind flips a coin
/// between the lognormal and spike shapes.
inline LeafPair draw_leaves(const TreeGeometry& g, const LeafDistribution& d, Rng& rng) {
  LeafDistribution::Kind kind = d.kind;
  if (kind == LeafDistribution::Kind::mixed) {
    kind = rng.coin() ? LeafDistribution::Kind::spike : LeafDistribution::Kind::lognormal;
  }
  if (kind == LeafDistribution::Kind::spike) return spike_leaves(g, d.mass, d.support, rng);
  LeafPair out;
  out.w = lognormal_leaves(g, d.mu, d.s, rng);
  out.sigma = lognormal_leaves(g, d.mu, d.s, rng);
  return out;
}

}  // namespace sbump
