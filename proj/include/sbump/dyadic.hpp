#pragma once

// Finite dyadic tree on [0,1): cubes, leaf step-function weights, sparse
// families with packing-constant certificates, and family generators.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbump/numeric.hpp"

namespace sbump {

inline constexpr int kMaxDepth = 24;

/// Dyadic interval [index * 2^-level, (index + 1) * 2^-level).
struct CubeId {
  int level = 0;
  std::uint64_t index = 0;

  [[nodiscard]] double measure() const { return std::ldexp(1.0, -level); }
  [[nodiscard]] CubeId parent() const { return {level - 1, index >> 1}; }
  [[nodiscard]] CubeId left() const { return {level + 1, index << 1}; }
  [[nodiscard]] CubeId right() const { return {level + 1, (index << 1) | 1}; }

  /// True when `other` is a (non-strict) subcube of this cube.
  [[nodiscard]] bool contains(const CubeId& other) const {
    return other.level >= level && (other.index >> (other.level - level)) == index;
  }

  /// Heap position: root is 0, children of n are 2n+1 and 2n+2.
  [[nodiscard]] std::size_t node() const {
    return ((std::size_t{1} << level) - 1) + static_cast<std::size_t>(index);
  }

  static CubeId from_node(std::size_t node) {
    const int level = std::bit_width(node + 1) - 1;
    return {level, static_cast<std::uint64_t>(node + 1 - (std::size_t{1} << level))};
  }

  auto operator<=>(const CubeId&) const = default;
};

struct TreeGeometry {
  int depth = 0;

  TreeGeometry() = default;
  explicit TreeGeometry(int d) : depth(d) {
    if (d < 0 || d > kMaxDepth) {
      throw std::domain_error("tree depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
    }
  }

  [[nodiscard]] std::size_t leaves() const { return std::size_t{1} << depth; }
  [[nodiscard]] std::size_t cubes() const { return (std::size_t{2} << depth) - 1; }
  [[nodiscard]] double leaf_measure() const { return std::ldexp(1.0, -depth); }

  [[nodiscard]] bool valid(const CubeId& q) const {
    return q.level >= 0 && q.level <= depth && q.index < (std::uint64_t{1} << q.level);
  }
  void require(const CubeId& q) const {
    if (!valid(q)) {
      throw std::domain_error("cube (" + std::to_string(q.level) + "," + std::to_string(q.index) +
                              ") outside tree of depth " + std::to_string(depth));
    }
  }

  /// Leaves under q occupy [first_leaf, first_leaf + leaf_count).
  [[nodiscard]] std::size_t first_leaf(const CubeId& q) const {
    return static_cast<std::size_t>(q.index) << (depth - q.level);
  }
  [[nodiscard]] std::size_t leaf_count(const CubeId& q) const {
    return std::size_t{1} << (depth - q.level);
  }
  [[nodiscard]] CubeId leaf(std::size_t i) const { return {depth, static_cast<std::uint64_t>(i)}; }

  bool operator==(const TreeGeometry&) const = default;
};

/// Every cube of the tree in (level, index) order.
inline std::vector<CubeId> all_cubes(const TreeGeometry& g) {
  std::vector<CubeId> out;
  out.reserve(g.cubes());
  for (std::size_t n = 0; n < g.cubes(); ++n) out.push_back(CubeId::from_node(n));
  return out;
}

inline void require_leaves(const TreeGeometry& g, std::span<const double> v, const char* what) {
  if (v.size() != g.leaves()) {
    throw std::domain_error(std::string(what) + ": expected " + std::to_string(g.leaves()) +
                            " leaf values, got " + std::to_string(v.size()));
  }
}

/// Mean of the leaf densities under `cube`.
inline double average(const TreeGeometry& g, std::span<const double> weights, const CubeId& cube) {
  g.require(cube);
  require_leaves(g, weights, "average");
  const std::size_t n = g.leaf_count(cube);
  return pairwise_sum(weights.subspan(g.first_leaf(cube), n)) / static_cast<double>(n);
}

/// w(Q) = |Q| * average.
inline double mass(const TreeGeometry& g, std::span<const double> weights, const CubeId& cube) {
  return average(g, weights, cube) * cube.measure();
}

/// Averages of every cube, indexed by CubeId::node(). Built bottom-up, so each
/// entry equals the pairwise sum of its leaves divided by the leaf count.
inline std::vector<double> cube_averages(const TreeGeometry& g, std::span<const double> weights) {
  require_leaves(g, weights, "cube_averages");
  std::vector<double> avg(g.cubes());
  const std::size_t first = g.leaves() - 1;
  std::copy(weights.begin(), weights.end(), avg.begin() + static_cast<std::ptrdiff_t>(first));
  for (std::size_t n = first; n-- > 0;) avg[n] = 0.5 * (avg[2 * n + 1] + avg[2 * n + 2]);
  return avg;
}

/// Two strictly positive leaf densities and an exponent p in (1, inf).
class WeightPair {
 public:
  WeightPair(TreeGeometry g, std::vector<double> w, std::vector<double> sigma, double p)
      : geometry_(g), w_(std::move(w)), sigma_(std::move(sigma)), p_(p) {
    require_leaves(g, w_, "w");
    require_leaves(g, sigma_, "sigma");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::domain_error("exponent p must lie in (1, inf)");
    auto check = [](const std::vector<double>& v, const char* name) {
      for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
          throw std::domain_error(std::string(name) + ": leaf densities must be positive and finite");
        }
      }
    };
    check(w_, "w");
    check(sigma_, "sigma");
    w_avg_ = cube_averages(g, w_);
    sigma_avg_ = cube_averages(g, sigma_);
  }

  [[nodiscard]] const TreeGeometry& geometry() const { return geometry_; }
  [[nodiscard]] std::span<const double> w() const { return w_; }
  [[nodiscard]] std::span<const double> sigma() const { return sigma_; }
  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] double p_conjugate() const { return p_ / (p_ - 1.0); }

  [[nodiscard]] double w_avg(const CubeId& q) const { return w_avg_[q.node()]; }
  [[nodiscard]] double sigma_avg(const CubeId& q) const { return sigma_avg_[q.node()]; }
  [[nodiscard]] double w_mass(const CubeId& q) const { return w_avg_[q.node()] * q.measure(); }
  [[nodiscard]] double sigma_mass(const CubeId& q) const { return sigma_avg_[q.node()] * q.measure(); }
  [[nodiscard]] std::span<const double> w_averages() const { return w_avg_; }
  [[nodiscard]] std::span<const double> sigma_averages() const { return sigma_avg_; }

  /// (sigma, w, p'): the pair whose testing constant is the dual one.
  [[nodiscard]] WeightPair dual() const { return WeightPair(geometry_, sigma_, w_, p_conjugate()); }

  [[nodiscard]] WeightPair scaled(double cw, double csigma) const {
    std::vector<double> w = w_, s = sigma_;
    for (double& x : w) x *= cw;
    for (double& x : s) x *= csigma;
    return WeightPair(geometry_, std::move(w), std::move(s), p_);
  }

 private:
  TreeGeometry geometry_;
  std::vector<double> w_, sigma_;
  double p_;
  std::vector<double> w_avg_, sigma_avg_;
};

inline constexpr double kDensityFloor = 1e-12;

/// Raise nonnegative leaf values below the positivity floor; returns how many
/// values were changed. Negative or non-finite input is rejected.
inline std::size_t clamp_leaves(std::vector<double>& v) {
  std::size_t changed = 0;
  for (double& x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::domain_error("leaf densities must be nonnegative and finite");
    }
    if (x < kDensityFloor) {
      x = kDensityFloor;
      ++changed;
    }
  }
  return changed;
}

/// Packing constant max_{Q in F} sum_{Q' in F, Q' <= Q} |Q'| / |Q| from a
/// membership mask indexed by node. Returns 0 for an empty mask.
inline double packing_from_mask(const TreeGeometry& g, const std::vector<char>& member) {
  std::vector<double> below(g.cubes(), 0.0);
  double best = 0.0;
  for (std::size_t n = g.cubes(); n-- > 0;) {
    const CubeId q = CubeId::from_node(n);
    double s = member[n] ? q.measure() : 0.0;
    if (q.level < g.depth) s += below[2 * n + 1] + below[2 * n + 2];
    below[n] = s;
    if (member[n]) best = std::max(best, s / q.measure());
  }
  return best;
}

/// A set of dyadic cubes together with its packing constant and the
/// sparseness parameter it was generated for.
class SparseFamily {
 public:
  SparseFamily(TreeGeometry g, std::vector<CubeId> cubes, double eta = 1.0)
      : geometry_(g), cubes_(std::move(cubes)), eta_(eta), member_(g.cubes(), 0) {
    for (const CubeId& q : cubes_) g.require(q);
    std::sort(cubes_.begin(), cubes_.end());
    cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
    for (const CubeId& q : cubes_) member_[q.node()] = 1;
    packing_ = cubes_.empty() ? 0.0 : packing_from_mask(g, member_);
  }

  [[nodiscard]] const TreeGeometry& geometry() const { return geometry_; }
  /// Sorted by (level, index).
  [[nodiscard]] const std::vector<CubeId>& cubes() const { return cubes_; }
  [[nodiscard]] std::size_t size() const { return cubes_.size(); }
  [[nodiscard]] bool empty() const { return cubes_.empty(); }
  [[nodiscard]] bool contains(const CubeId& q) const {
    return geometry_.valid(q) && member_[q.node()] != 0;
  }
  [[nodiscard]] const std::vector<char>& mask() const { return member_; }
  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] double packing() const { return packing_; }

  /// Members Q' of the family with Q' a subcube of r.
  [[nodiscard]] std::vector<CubeId> within(const CubeId& r) const {
    std::vector<CubeId> out;
    for (const CubeId& q : cubes_) {
      if (r.contains(q)) out.push_back(q);
    }
    return out;
  }

 private:
  TreeGeometry geometry_;
  std::vector<CubeId> cubes_;
  double eta_;
  std::vector<char> member_;
  double packing_ = 0.0;
};

/// Carleson packing constant of a nonempty family (one bottom-up pass).
inline double packing_constant(const SparseFamily& family) {
  if (family.empty()) throw std::domain_error("packing_constant: empty family");
  return packing_from_mask(family.geometry(), family.mask());
}

/// The operative sparseness test: packing constant at most 1/eta.
inline bool verify_sparse(const SparseFamily& family, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("verify_sparse: eta must lie in (0, 1]");
  return packing_constant(family) <= 1.0 / eta;
}

/// Principal cubes: from each stopping cube P, the maximal descendants Q with
/// sigma_Q > a * sigma_P. The result is (1 - 1/a)-sparse.
inline SparseFamily stopping_time_family(std::span<const double> sigma, double a, const TreeGeometry& g) {
  if (!(a > 1.0)) throw std::domain_error("stopping_time_family: a must exceed 1");
  const std::vector<double> avg = cube_averages(g, sigma);
  std::vector<CubeId> chosen{CubeId{0, 0}};
  // (candidate, average of its current stopping ancestor)
  std::vector<std::pair<CubeId, double>> stack;
  if (g.depth > 0) {
    stack.push_back({CubeId{0, 0}.left(), avg[0]});
    stack.push_back({CubeId{0, 0}.right(), avg[0]});
  }
  while (!stack.empty()) {
    auto [q, top] = stack.back();
    stack.pop_back();
    double next_top = top;
    if (avg[q.node()] > a * top) {
      chosen.push_back(q);
      next_top = avg[q.node()];
    }
    if (q.level < g.depth) {
      stack.push_back({q.left(), next_top});
      stack.push_back({q.right(), next_top});
    }
  }
  return SparseFamily(g, std::move(chosen), 1.0 - 1.0 / a);
}

struct SparseStrategy {
  enum class Kind { tower, random_greedy, all_above_level, stopping_time };
  Kind kind = Kind::tower;
  /// Cut level for all_above_level; negative selects the deepest feasible one.
  int level = -1;
};

inline std::string to_string(SparseStrategy::Kind k) {
  switch (k) {
    case SparseStrategy::Kind::tower: return "tower";
    case SparseStrategy::Kind::random_greedy: return "random_greedy";
    case SparseStrategy::Kind::all_above_level: return "all_above_level";
    case SparseStrategy::Kind::stopping_time: return "stopping_time";
  }
  return "unknown";
}

inline SparseStrategy::Kind parse_strategy(const std::string& s) {
  if (s == "tower") return SparseStrategy::Kind::tower;
  if (s == "random_greedy") return SparseStrategy::Kind::random_greedy;
  if (s == "all_above_level") return SparseStrategy::Kind::all_above_level;
  if (s == "stopping_time") return SparseStrategy::Kind::stopping_time;
  throw std::invalid_argument("unknown sparse strategy '" + s + "'");
}

/// Build an eta-sparse family. `sigma` is required by the stopping_time
/// strategy (stopping ratio a = 1/(1 - eta)) and ignored otherwise.
inline SparseFamily generate_sparse(const TreeGeometry& g, SparseStrategy strategy, double eta,
                                    std::uint64_t seed, std::span<const double> sigma = {}) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("generate_sparse: eta must lie in (0, 1]");
  const double budget = 1.0 / eta;
  std::vector<CubeId> cubes;
  switch (strategy.kind) {
    case SparseStrategy::Kind::tower: {
      // Packing of the tower truncated at level K is 2 - 2^-K.
      cubes.push_back({0, 0});
      for (int k = 1; k <= g.depth && 2.0 - std::ldexp(1.0, -k) <= budget; ++k) cubes.push_back({k, 0});
      break;
    }
    case SparseStrategy::Kind::all_above_level: {
      int m = strategy.level;
      if (m < 0) m = std::min(g.depth, static_cast<int>(std::floor(budget)) - 1);
      if (m > g.depth) throw std::domain_error("all_above_level: cut level exceeds depth");
      if (static_cast<double>(m + 1) > budget) {
        throw std::domain_error("all_above_level: packing m+1 exceeds 1/eta");
      }
      for (int l = 0; l <= m; ++l) {
        for (std::uint64_t j = 0; j < (std::uint64_t{1} << l); ++j) cubes.push_back({l, j});
      }
      break;
    }
    case SparseStrategy::Kind::random_greedy: {
      Rng rng(seed);
      std::vector<char> member(g.cubes(), 0);
      std::vector<double> below(g.cubes(), 0.0);  // family mass below each node
      auto admit = [&](const CubeId& q) {
        // Every family ancestor A of q (and q itself) must keep
        // below[A] + |q| <= |A| / eta.
        const double add = q.measure();
        if (add > budget * q.measure()) return false;
        for (CubeId a = q; a.level > 0;) {
          a = a.parent();
          if (member[a.node()] && below[a.node()] + add > budget * a.measure()) return false;
        }
        member[q.node()] = 1;
        below[q.node()] += add;
        for (CubeId a = q; a.level > 0;) {
          a = a.parent();
          below[a.node()] += add;
        }
        return true;
      };
      admit({0, 0});
      cubes.push_back({0, 0});
      for (int l = 1; l <= g.depth; ++l) {
        std::vector<std::uint64_t> order(std::size_t{1} << l);
        for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
        rng.shuffle(order);
        for (std::uint64_t j : order) {
          if (rng.coin()) continue;
          const CubeId q{l, j};
          if (admit(q)) cubes.push_back(q);
        }
      }
      break;
    }
    case SparseStrategy::Kind::stopping_time: {
      if (sigma.empty()) throw std::domain_error("stopping_time strategy needs sigma leaves");
      if (eta >= 1.0) return SparseFamily(g, {CubeId{0, 0}}, eta);
      SparseFamily f = stopping_time_family(sigma, 1.0 / (1.0 - eta), g);
      return SparseFamily(g, f.cubes(), eta);
    }
  }
  return SparseFamily(g, std::move(cubes), eta);
}

}  // namespace sbump
