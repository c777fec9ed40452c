#pragma once

// Bump-constant functionals: sups over a cube set of A_p-type expressions
// built from averages, the nu_p bump, Orlicz (Luxemburg) norms, the dyadic
// maximal function and the entropy ratio.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "sbump/bump_functions.hpp"
#include "sbump/dyadic.hpp"
#include "sbump/young.hpp"

namespace sbump {

/// The value of a sup over cubes and the first cube (in (level, index)
/// order) attaining it.
struct SupResult {
  double value = 0.0;
  CubeId argmax{};
};

/// Per-cube table indexed by CubeId::node(); NaN marks cubes not computed.
using CubeTable = std::vector<double>;

namespace detail {

template <class Term>
SupResult sup_over(std::span<const CubeId> cubes, Term&& term) {
  SupResult best{-kInf, {}};
  std::vector<CubeId> sorted(cubes.begin(), cubes.end());
  std::sort(sorted.begin(), sorted.end());
  for (const CubeId& q : sorted) {
    const double v = term(q);
    if (v > best.value) best = {v, q};
  }
  return best;
}

inline void require_cubes(const WeightPair& pair, std::span<const CubeId> cubes) {
  for (const CubeId& q : cubes) pair.geometry().require(q);
}

/// phi evaluated at max(1, x); the bump families are defined for ratios of
/// at least 1.
inline double phi_floor1(const Bump& bump, double x) { return bump.phi(std::max(1.0, x)); }

inline std::vector<double> powered(std::span<const double> v, double e) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::pow(v[i], e);
  return out;
}

}  // namespace detail

/// [w, sigma]_{A_p} = sup_Q w_Q sigma_Q^{p-1}.
inline SupResult ap_constant_sup(const WeightPair& pair, std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  const double p = pair.p();
  return detail::sup_over(cubes, [&](const CubeId& q) {
    return pair.w_avg(q) * std::pow(pair.sigma_avg(q), p - 1.0);
  });
}

inline double ap_constant(const WeightPair& pair, std::span<const CubeId> cubes) {
  return ap_constant_sup(pair, cubes).value;
}

inline double ap_constant(const WeightPair& pair) {
  return ap_constant(pair, all_cubes(pair.geometry()));
}

/// [w, sigma]_{nu_p} = sup_Q w_Q sigma_Q^{p-1} nu_p(sigma_Q).
inline SupResult nu_constant_sup(const WeightPair& pair, const Bump& bump, std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  const double p = pair.p();
  return detail::sup_over(cubes, [&](const CubeId& q) {
    const double s = pair.sigma_avg(q);
    return pair.w_avg(q) * std::pow(s, p - 1.0) * bump.nu(p, s);
  });
}

inline double nu_constant(const WeightPair& pair, const Bump& bump, std::span<const CubeId> cubes) {
  return nu_constant_sup(pair, bump, cubes).value;
}

/// sup_Q w_Q^{1/p} sigma_Q^{1/p'} psi(sigma_Q)^{1/p}: the maximal-operator bound.
inline double maximal_bound_constant(const WeightPair& pair, const Bump& bump, std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  const double p = pair.p();
  const double pc = pair.p_conjugate();
  return detail::sup_over(cubes, [&](const CubeId& q) {
           const double s = pair.sigma_avg(q);
           return std::pow(pair.w_avg(q), 1.0 / p) * std::pow(s, 1.0 / pc) * std::pow(bump.psi(s), 1.0 / p);
         })
      .value;
}

/// The nu_p route's lambda table: lambda_Q = psi(sigma_Q).
inline CubeTable psi_lambda_table(const WeightPair& pair, const Bump& bump, std::span<const CubeId> cubes) {
  CubeTable t(pair.geometry().cubes(), std::nan(""));
  for (const CubeId& q : cubes) t[q.node()] = bump.psi(pair.sigma_avg(q));
  return t;
}

// ---------------------------------------------------------------------------
// Orlicz bumps

struct OrliczResult {
  double value = 0.0;
  CubeId argmax{};
  /// lambda_Q(sigma) = sigma_Q / ||sigma^{1/p}||_{A,Q}^p on the requested cubes.
  CubeTable lambda;
};

namespace detail {

inline void require_bp(const Young& young, double p) {
  if (!young.bp_integral(p).finite) {
    throw precondition_error("Young function violates the B_p condition for p = " + std::to_string(p));
  }
}

inline OrliczResult orlicz_li_unchecked(const WeightPair& pair, const Young& young, const Bump& bump,
                                        std::span<const CubeId> cubes) {
  const double p = pair.p();
  const double pc = pair.p_conjugate();
  const TreeGeometry& g = pair.geometry();
  const std::vector<double> root = powered(pair.sigma(), 1.0 / p);
  OrliczResult out;
  out.lambda.assign(g.cubes(), std::nan(""));
  const SupResult s = sup_over(cubes, [&](const CubeId& q) {
    const double norm = luxemburg_norm(g, root, q, young);
    const double sq = pair.sigma_avg(q);
    const double lambda = sq / std::pow(norm, p);
    out.lambda[q.node()] = lambda;
    return std::pow(pair.w_avg(q), 1.0 / p) * (sq / norm) * std::pow(phi_floor1(bump, lambda), 1.0 / pc);
  });
  out.value = s.value;
  out.argmax = s.argmax;
  return out;
}

inline double orlicz_lacey_unchecked(const WeightPair& pair, const Young& young, const Bump& bump,
                                     std::span<const CubeId> cubes) {
  const double p = pair.p();
  const double pc = pair.p_conjugate();
  const TreeGeometry& g = pair.geometry();
  const std::vector<double> root = powered(pair.sigma(), 1.0 / pc);
  const Complementary bar{young};
  return sup_over(cubes, [&](const CubeId& q) {
           const double norm = luxemburg_norm(g, root, q, bar);
           const double arg = std::pow(norm, p) / std::pow(pair.sigma_avg(q), p - 1.0);
           return std::pow(pair.w_avg(q), 1.0 / p) * norm * std::pow(phi_floor1(bump, arg), 1.0 / pc);
         })
      .value;
}

inline double separated_bump_unchecked(const WeightPair& pair, const Young& young, std::span<const CubeId> cubes) {
  const double p = pair.p();
  const TreeGeometry& g = pair.geometry();
  const std::vector<double> root = powered(pair.sigma(), 1.0 / pair.p_conjugate());
  const Complementary bar{young};
  return sup_over(cubes, [&](const CubeId& q) {
           return std::pow(pair.w_avg(q), 1.0 / p) * luxemburg_norm(g, root, q, bar);
         })
      .value;
}

}  // namespace detail

/// sup_Q (w_Q)^{1/p} (sigma_Q / ||sigma^{1/p}||_{A,Q}) phi^{1/p'}(lambda_Q),
/// with lambda_Q = sigma_Q / ||sigma^{1/p}||_{A,Q}^p. Requires A in B_p.
inline OrliczResult orlicz_li_constant(const WeightPair& pair, const Young& young, const Bump& bump,
                                       std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  detail::require_bp(young, pair.p());
  return detail::orlicz_li_unchecked(pair, young, bump, cubes);
}

/// sup_Q (w_Q)^{1/p} ||sigma^{1/p'}||_{Abar,Q}
///       phi^{1/p'}(||sigma^{1/p'}||_{Abar,Q}^p / sigma_Q^{p-1}). Requires A in B_p.
inline double orlicz_lacey_constant(const WeightPair& pair, const Young& young, const Bump& bump,
                                    std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  detail::require_bp(young, pair.p());
  return detail::orlicz_lacey_unchecked(pair, young, bump, cubes);
}

/// Right side of the separated bump conjecture: sup_Q (w_Q)^{1/p} ||sigma^{1/p'}||_{Abar,Q}.
inline double separated_bump_constant(const WeightPair& pair, const Young& young, std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  detail::require_bp(young, pair.p());
  return detail::separated_bump_unchecked(pair, young, cubes);
}

// ---------------------------------------------------------------------------
// Entropy bumps

/// Dyadic maximal function of sigma restricted to `cube`: for each leaf x of
/// the cube, the largest sigma_{Q'} over dyadic x <= Q' <= cube. Returned in
/// leaf order within the cube.
namespace detail {

inline std::vector<double> dyadic_maximal_from(const TreeGeometry& g, std::span<const double> avg,
                                               const CubeId& cube) {
  // Top-down: running max along the path from `cube`.
  std::vector<double> run{avg[cube.node()]};
  std::vector<CubeId> level{cube};
  for (int l = cube.level; l < g.depth; ++l) {
    std::vector<double> next_run;
    std::vector<CubeId> next_level;
    next_run.reserve(run.size() * 2);
    next_level.reserve(run.size() * 2);
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (const CubeId c : {level[i].left(), level[i].right()}) {
        next_level.push_back(c);
        next_run.push_back(std::max(run[i], avg[c.node()]));
      }
    }
    run = std::move(next_run);
    level = std::move(next_level);
  }
  return run;
}

inline double entropy_lambda_from(const TreeGeometry& g, std::span<const double> avg, const CubeId& cube) {
  const std::vector<double> m = dyadic_maximal_from(g, avg, cube);
  return (pairwise_sum(m) / static_cast<double>(m.size())) / avg[cube.node()];
}

}  // namespace detail

/// Dyadic maximal function of sigma restricted to `cube`: for each leaf x of
/// the cube, the largest sigma_{Q'} over dyadic x <= Q' <= cube. Returned in
/// leaf order within the cube.
inline std::vector<double> dyadic_maximal(const TreeGeometry& g, std::span<const double> sigma, const CubeId& cube) {
  g.require(cube);
  return detail::dyadic_maximal_from(g, cube_averages(g, sigma), cube);
}

/// lambda_Q(sigma) = int_Q M(sigma chi_Q) / sigma(Q), at least 1.
inline double entropy_lambda(const TreeGeometry& g, std::span<const double> sigma, const CubeId& cube) {
  g.require(cube);
  return detail::entropy_lambda_from(g, cube_averages(g, sigma), cube);
}

inline CubeTable entropy_lambda_table(const WeightPair& pair, std::span<const CubeId> cubes) {
  CubeTable t(pair.geometry().cubes(), std::nan(""));
  for (const CubeId& q : cubes) t[q.node()] = detail::entropy_lambda_from(pair.geometry(), pair.sigma_averages(), q);
  return t;
}

/// sup_Q (w_Q)^{1/p} (sigma_Q)^{1/p'} lambda_Q^{1/p} phi(lambda_Q), entropy lambda.
inline SupResult entropy_constant_sup(const WeightPair& pair, const Bump& bump, std::span<const CubeId> cubes) {
  detail::require_cubes(pair, cubes);
  const double p = pair.p();
  const double pc = pair.p_conjugate();
  return detail::sup_over(cubes, [&](const CubeId& q) {
    const double lambda = detail::entropy_lambda_from(pair.geometry(), pair.sigma_averages(), q);
    return std::pow(pair.w_avg(q), 1.0 / p) * std::pow(pair.sigma_avg(q), 1.0 / pc) * std::pow(lambda, 1.0 / p) *
           detail::phi_floor1(bump, lambda);
  });
}

inline double entropy_constant(const WeightPair& pair, const Bump& bump, std::span<const CubeId> cubes) {
  return entropy_constant_sup(pair, bump, cubes).value;
}

}  // namespace sbump
