#pragma once

// Young functions, their complementary functions, normalized Luxemburg norms
// over a single dyadic cube, and the B_p integral.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbump/dyadic.hpp"
#include "sbump/numeric.hpp"

namespace sbump {

struct YoungSpec {
  enum class Family { power, power_over_log, tabulated };
  Family family = Family::power_over_log;
  /// Exponent q of t^q; a nonpositive value means "use the instance p".
  double exponent = 0.0;
  double eps = 1.0;
  std::vector<std::pair<double, double>> points;  // tabulated only
};

inline std::string to_string(YoungSpec::Family f) {
  switch (f) {
    case YoungSpec::Family::power: return "power";
    case YoungSpec::Family::power_over_log: return "power_over_log";
    case YoungSpec::Family::tabulated: return "tabulated";
  }
  return "unknown";
}

inline YoungSpec::Family parse_young_family(const std::string& s) {
  if (s == "power") return YoungSpec::Family::power;
  if (s == "power_over_log") return YoungSpec::Family::power_over_log;
  if (s == "tabulated") return YoungSpec::Family::tabulated;
  throw std::invalid_argument("unknown Young family '" + s + "'");
}

struct YoungAdmissibility {
  bool increasing = false;
  bool vanishes_at_zero = false;
  /// Difference quotients nondecreasing on the grid. Reported, not enforced:
  /// t^q / log^{1+eps}(e+t) fails it on a bounded interval when q < 2.
  bool convex = false;
};

struct BpResult {
  double value = kInf;
  bool finite = false;
};

/// An immutable Young function A with a tabulated complementary function.
///   power:          A(t) = t^q
///   power_over_log: A(t) = t^q log^{1+eps}(e+1) / log^{1+eps}(e+t)   (A(1) = 1)
///   tabulated:      log-log linear through the given points, A(0) = 0
class Young {
 public:
  static constexpr int kHullPerOctave = 32;
  static constexpr int kHullOctaves = 128;

  /// `p` resolves a nonpositive spec exponent.
  explicit Young(YoungSpec spec, double p = 0.0) : spec_(std::move(spec)) {
    if (spec_.family != YoungSpec::Family::tabulated) {
      if (!(spec_.exponent > 0.0)) spec_.exponent = p;
      if (!(spec_.exponent > 1.0)) throw std::domain_error("Young function exponent must exceed 1");
    } else {
      table_ = LogLogTable(spec_.points);
    }
    log_norm_ = std::pow(std::log(kEuler + 1.0), 1.0 + spec_.eps);
    check_shape();
    if (!report_.increasing || !report_.vanishes_at_zero) {
      throw std::domain_error("not a Young function: must be increasing with A(0) = 0");
    }
    build_conjugate_table();
  }

  [[nodiscard]] const YoungSpec& spec() const { return spec_; }
  [[nodiscard]] const YoungAdmissibility& admissibility() const { return report_; }

  [[nodiscard]] double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    switch (spec_.family) {
      case YoungSpec::Family::power: return std::pow(t, spec_.exponent);
      case YoungSpec::Family::power_over_log:
        return std::pow(t, spec_.exponent) * log_norm_ / std::pow(std::log(kEuler + t), 1.0 + spec_.eps);
      case YoungSpec::Family::tabulated: return table_(t);
    }
    return 0.0;
  }

  /// log A(e^u), computed without forming e^u.
  [[nodiscard]] double log_at_log(double u) const {
    switch (spec_.family) {
      case YoungSpec::Family::power: return spec_.exponent * u;
      case YoungSpec::Family::power_over_log: {
        const double log_e_plus = u > 1.0 ? u + std::log1p(std::exp(1.0 - u)) : std::log(kEuler + std::exp(u));
        return spec_.exponent * u + std::log(log_norm_) - (1.0 + spec_.eps) * std::log(log_e_plus);
      }
      case YoungSpec::Family::tabulated: return table_.log_at_log(u);
    }
    return 0.0;
  }

  /// log(A(e^u) / e^{pu}), with the power parts combined before the large
  /// terms can cancel.
  [[nodiscard]] double log_ratio_at_log(double u, double p) const {
    switch (spec_.family) {
      case YoungSpec::Family::power: return (spec_.exponent - p) * u;
      case YoungSpec::Family::power_over_log: {
        const double log_e_plus = u > 1.0 ? u + std::log1p(std::exp(1.0 - u)) : std::log(kEuler + std::exp(u));
        return (spec_.exponent - p) * u + std::log(log_norm_) - (1.0 + spec_.eps) * std::log(log_e_plus);
      }
      case YoungSpec::Family::tabulated: return table_.log_at_log(u) - p * u;
    }
    return 0.0;
  }

  /// Complementary function sup_{t >= 0} (s t - A(t)) evaluated directly.
  /// Closed form for the power family; otherwise a log-spaced scan over
  /// [2^-200, 2^200] followed by ternary refinement around the best point
  /// (the scan keeps this correct when A is only approximately convex).
  [[nodiscard]] double conjugate_exact(double s) const {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::domain_error("young_conjugate: s must be >= 0");
    if (s == 0.0) return 0.0;
    if (spec_.family == YoungSpec::Family::power) {
      const double q = spec_.exponent;
      const double t = std::pow(s / q, 1.0 / (q - 1.0));
      return s * t - std::pow(t, q);
    }
    auto gain = [&](double u) {
      const double t = std::exp(u);
      return s * t - (*this)(t);
    };
    const double lo = -200.0 * std::numbers::ln2;
    const double hi = 200.0 * std::numbers::ln2;
    const int n = 3200;
    const double step = (hi - lo) / n;
    int best = 0;
    double best_val = gain(lo);
    for (int i = 1; i <= n; ++i) {
      const double v = gain(lo + i * step);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best == n) throw numeric_error("young_conjugate: supremum not attained below 2^200");
    double a = lo + std::max(0, best - 1) * step;
    double b = lo + std::min(n, best + 1) * step;
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
      const double m1 = a + (b - a) / 3.0;
      const double m2 = b - (b - a) / 3.0;
      if (gain(m1) < gain(m2)) {
        a = m1;
      } else {
        b = m2;
      }
    }
    return std::max({0.0, best_val, gain(0.5 * (a + b))});
  }

  /// Complementary function through the lower convex hull of A sampled on
  /// a log grid: a binary search over hull slopes finds the maximizing grid
  /// point, and a local ternary search between its grid neighbours refines
  /// it. Arguments whose maximizer lies off the grid use conjugate_exact.
  [[nodiscard]] double conjugate(double s) const {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::domain_error("young_conjugate: s must be >= 0");
    if (s == 0.0) return 0.0;
    if (spec_.family == YoungSpec::Family::power) return conjugate_exact(s);
    // hull_slope_[k] is the slope from hull vertex k to k + 1.
    const auto it = std::lower_bound(hull_slope_.begin(), hull_slope_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - hull_slope_.begin());
    if (k == 0 || k == hull_slope_.size()) return conjugate_exact(s);
    const std::size_t j = hull_index_[k];
    auto gain = [&](double u) { return s * std::exp(u) - (*this)(std::exp(u)); };
    double a = grid_u_[j > 0 ? j - 1 : 0];
    double b = grid_u_[std::min(j + 1, grid_u_.size() - 1)];
    for (int iter = 0; iter < 80 && b - a > 1e-9; ++iter) {
      const double m1 = a + (b - a) / 3.0;
      const double m2 = b - (b - a) / 3.0;
      if (gain(m1) < gain(m2)) {
        a = m1;
      } else {
        b = m2;
      }
    }
    return std::max({0.0, gain(grid_u_[j]), gain(0.5 * (a + b))});
  }

  /// Integral of A(t) / t^p dt/t over [1, inf). Dyadic blocks in t cover
  /// [1, 2^40]; beyond that blocks [U 2^j, U 2^{j+1}] in u = log t are
  /// integrated and the remainder is extrapolated from their geometric
  /// ratio. Returns an infinite value when the blocks fail to decay
  /// geometrically.
  [[nodiscard]] BpResult bp_integral(double p) const {
    if (!(p > 1.0)) throw std::domain_error("bp_integral: p must exceed 1");
    auto h = [&](double u) { return std::exp(log_ratio_at_log(u, p)); };
    double total = 0.0;
    const double ln2 = std::numbers::ln2;
    for (int k = 0; k < 40; ++k) total += integrate(h, k * ln2, (k + 1) * ln2, 1e-14);
    const double u0 = 40.0 * ln2;
    auto hv = [&](double v) {
      const double u = std::exp(v);
      return h(u) * u;
    };
    constexpr int kBlocks = 40;
    std::vector<double> blocks;
    for (int j = 0; j < kBlocks; ++j) {
      const double a = std::log(u0) + j * ln2;
      const double b = a + ln2;
      const double v = integrate(hv, a, b, 1e-14);
      if (!std::isfinite(v)) return {};
      blocks.push_back(v);
      total += v;
      if (v == 0.0 || (v < 1e-300)) return {total, true};
    }
    const double r1 = blocks[kBlocks - 2] / blocks[kBlocks - 3];
    const double r2 = blocks[kBlocks - 1] / blocks[kBlocks - 2];
    if (!(r2 < 1.0 - 1e-3) || std::abs(r2 - r1) > 1e-2) return {};
    total += blocks.back() * r2 / (1.0 - r2);
    return {total, std::isfinite(total)};
  }

 private:
  void check_shape() {
    constexpr int per_octave = 8;
    constexpr int octaves = 40;
    report_.increasing = true;
    report_.convex = true;
    double prev_t = 0.0, prev_a = 0.0, prev_slope = 0.0;
    for (int j = -per_octave * octaves; j <= per_octave * octaves; ++j) {
      const double t = std::exp2(static_cast<double>(j) / per_octave);
      const double a = (*this)(t);
      if (!(a > prev_a) && j > -per_octave * octaves) report_.increasing = false;
      const double slope = (a - prev_a) / (t - prev_t);
      if (j > -per_octave * octaves && slope < prev_slope * (1.0 - 1e-10)) report_.convex = false;
      prev_slope = slope;
      prev_t = t;
      prev_a = a;
    }
    report_.vanishes_at_zero = (*this)(std::exp2(-octaves)) < 1e-6;
  }

  void build_conjugate_table() {
    if (spec_.family == YoungSpec::Family::power) return;
    const int n = kHullPerOctave * 2 * kHullOctaves + 1;
    const double du = std::numbers::ln2 / kHullPerOctave;
    std::vector<double> t, a;
    for (int i = 0; i < n; ++i) {
      const double u = -kHullOctaves * std::numbers::ln2 + i * du;
      const double v = (*this)(std::exp(u));
      if (!std::isfinite(v)) break;
      grid_u_.push_back(u);
      t.push_back(std::exp(u));
      a.push_back(v);
    }
    // Lower hull of the origin and the grid points, by a monotone chain.
    std::vector<std::size_t> hull;  // grid indices; the origin is implicit
    auto cross_above = [&](double x0, double y0, std::size_t i1, std::size_t i2) {
      // true when point i1 lies on or above the chord from (x0,y0) to i2
      return (a[i1] - y0) * (t[i2] - x0) >= (a[i2] - y0) * (t[i1] - x0);
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
      while (!hull.empty()) {
        const std::size_t top = hull.back();
        const double x0 = hull.size() >= 2 ? t[hull[hull.size() - 2]] : 0.0;
        const double y0 = hull.size() >= 2 ? a[hull[hull.size() - 2]] : 0.0;
        if (!cross_above(x0, y0, top, i)) break;
        hull.pop_back();
      }
      hull.push_back(i);
    }
    hull_index_.assign(1, 0);  // slot 0 stands for the origin
    hull_index_.insert(hull_index_.end(), hull.begin(), hull.end());
    hull_slope_.clear();
    double x0 = 0.0, y0 = 0.0;
    for (std::size_t i : hull) {
      hull_slope_.push_back((a[i] - y0) / (t[i] - x0));
      x0 = t[i];
      y0 = a[i];
    }
  }

  YoungSpec spec_;
  LogLogTable table_;
  double log_norm_ = 1.0;
  YoungAdmissibility report_;
  std::vector<double> grid_u_;
  std::vector<std::size_t> hull_index_;
  std::vector<double> hull_slope_;
};

/// Young-function view of the complementary function of a Young object.
struct Complementary {
  const Young& young;
  double operator()(double s) const { return young.conjugate(s); }
};

inline double young_conjugate(const Young& young, double s) { return young.conjugate_exact(s); }

inline BpResult bp_integral(const Young& young, double p) { return young.bp_integral(p); }

/// Normalized Luxemburg norm of the nonnegative leaf function f over `cube`:
/// the lambda with (1/|Q|) int_Q A(f / lambda) = 1, by bracketing and
/// geometric bisection to relative tolerance `rel_tol`.
template <class YoungFn>
double luxemburg_norm(const TreeGeometry& g, std::span<const double> f, const CubeId& cube, const YoungFn& A,
                      double rel_tol = 1e-12) {
  g.require(cube);
  require_leaves(g, f, "luxemburg_norm");
  const std::span<const double> v = f.subspan(g.first_leaf(cube), g.leaf_count(cube));
  double top = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw std::domain_error("luxemburg_norm: non-finite leaf value");
    if (x < 0.0) throw std::domain_error("luxemburg_norm: f must be nonnegative");
    top = std::max(top, x);
  }
  if (top == 0.0) return 0.0;
  std::vector<double> terms(v.size());
  auto mean_a = [&](double lambda) {
    for (std::size_t i = 0; i < v.size(); ++i) terms[i] = A(v[i] / lambda);
    return pairwise_sum(terms) / static_cast<double>(v.size());
  };
  double lo = top, hi = top;
  int guard = 0;
  while (mean_a(lo) < 1.0) {
    lo *= 0.5;
    if (++guard > 2200) throw numeric_error("luxemburg_norm: failed to bracket from below");
  }
  guard = 0;
  while (mean_a(hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 2200) throw numeric_error("luxemburg_norm: failed to bracket from above");
  }
  for (int it = 0; it < 400 && hi > lo * (1.0 + rel_tol); ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mean_a(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

inline double luxemburg_norm(const TreeGeometry& g, std::span<const double> f, const CubeId& cube,
                             const Young& young) {
  return luxemburg_norm(g, f, cube, [&](double t) { return young(t); });
}

}  // namespace sbump
