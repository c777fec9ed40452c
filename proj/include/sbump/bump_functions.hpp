#pragma once

// The psi / phi bump families, the derived nu_p bump, and the admissibility
// engine certifying monotonicity and the dyadic tail sums S_psi, S_phi.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbump/numeric.hpp"

namespace sbump {

/// Logarithmic bump shapes evaluated at s >= 1 (s = t above 1, s = 1/t below):
///   log_power:  log^{1+eps}(e + s)
///   log_loglog: log(e + s) * loglog^{1+eps}(e^e + s)
struct LogBump {
  enum class Family { log_power, log_loglog };
  Family family = Family::log_power;
  double eps = 1.0;

  [[nodiscard]] double operator()(double s) const {
    const double l = std::log(kEuler + s);
    if (family == Family::log_power) return std::pow(l, 1.0 + eps);
    return l * std::pow(std::log(std::log(std::exp(kEuler) + s)), 1.0 + eps);
  }

  /// Value at s = 2^k, stable for k far beyond the double range of s.
  [[nodiscard]] double at_pow2(double k) const {
    if (k < 60.0) return (*this)(std::exp2(k));
    const double l = k * std::numbers::ln2;  // log(e + 2^k) to double precision
    if (family == Family::log_power) return std::pow(l, 1.0 + eps);
    return l * std::pow(std::log(l), 1.0 + eps);
  }

  /// Upper bound for sum_{k > K} 1/value(2^k), by comparison with the
  /// integral of 1/value(2^x) over [K, inf). Infinite when eps <= 0.
  [[nodiscard]] double tail_bound(int K) const {
    if (!(eps > 0.0)) return kInf;
    const double ln2 = std::numbers::ln2;
    if (family == Family::log_power) {
      // value(2^x) >= (x ln2)^{1+eps}
      return 1.0 / (eps * std::pow(ln2, 1.0 + eps) * std::pow(static_cast<double>(K), eps));
    }
    // value(2^x) >= x ln2 * (ln(x ln2))^{1+eps}, valid once x ln2 > e
    const double u = static_cast<double>(K) * ln2;
    return 1.0 / (ln2 * eps * std::pow(std::log(u), eps));
  }

  bool operator==(const LogBump&) const = default;
};

inline std::string to_string(LogBump::Family f) {
  return f == LogBump::Family::log_power ? "log_power" : "log_loglog";
}

inline LogBump::Family parse_log_family(const std::string& s) {
  if (s == "log_power") return LogBump::Family::log_power;
  if (s == "log_loglog") return LogBump::Family::log_loglog;
  throw std::invalid_argument("unknown bump family '" + s + "'");
}

/// psi: either the built-in two-branch form, or a custom table interpolated
/// log-log linearly (and extended as a power law beyond its ends).
struct PsiSpec {
  LogBump upper{LogBump::Family::log_power, 1.0};
  LogBump lower{LogBump::Family::log_loglog, 1.0};
  std::vector<std::pair<double, double>> table;  // nonempty selects tabulated

  [[nodiscard]] bool tabulated() const { return !table.empty(); }
};

struct BumpSpec {
  PsiSpec psi;
  LogBump phi{LogBump::Family::log_loglog, 1.0};
};

/// Outcome of the admissibility checks; `failure` names the first failed one.
struct BumpAdmissibility {
  bool psi_monotone = false;
  bool psi_tail_finite = false;
  double s_psi = kInf;
  bool phi_monotone = false;
  bool phi_tail_finite = false;
  double s_phi = kInf;
  double growth_constant = kInf;  // max psi(t) e^{-sqrt t} over the grid on [1, 2^40]
  bool admissible = false;
  std::string failure;
};

class inadmissible_bump : public std::invalid_argument {
 public:
  inadmissible_bump(const std::string& what, BumpAdmissibility report)
      : std::invalid_argument(what), report_(std::move(report)) {}
  [[nodiscard]] const BumpAdmissibility& report() const { return report_; }

 private:
  BumpAdmissibility report_;
};

namespace detail {

inline constexpr int kGridPerOctave = 8;
inline constexpr int kGridOctaves = 40;
inline constexpr int kTailCut = 64;

struct PsiEval {
  const PsiSpec& spec;
  LogLogTable table;

  explicit PsiEval(const PsiSpec& s) : spec(s) {
    if (s.tabulated()) table = LogLogTable(s.table);
  }
  [[nodiscard]] double lower(double t) const {
    return spec.tabulated() ? table(t) : spec.lower(1.0 / t);
  }
  [[nodiscard]] double upper(double t) const { return spec.tabulated() ? table(t) : spec.upper(t); }
  [[nodiscard]] double operator()(double t) const { return t < 1.0 ? lower(t) : upper(t); }

  /// Infimum of psi over the level interval (2^k, 2^{k+1}], assuming the
  /// monotonicity that the admissibility engine certifies. The lower branch
  /// is also evaluated at t = 1 so that a jump at 1 is accounted for.
  [[nodiscard]] double level_infimum(int k) const {
    const double a = std::ldexp(1.0, k);
    const double b = std::ldexp(1.0, k + 1);
    if (k >= 0) return std::min(upper(a), upper(b));
    if (k == -1) return std::min({lower(a), lower(1.0), upper(1.0)});
    return std::min(lower(a), lower(b));
  }
};

}  // namespace detail

/// Runs every admissibility check on a bump specification.
inline BumpAdmissibility check_bump(const BumpSpec& spec) {
  BumpAdmissibility r;
  detail::PsiEval psi(spec.psi);
  const int n = detail::kGridPerOctave * detail::kGridOctaves;
  auto grid = [](int j) { return std::exp2(static_cast<double>(j) / detail::kGridPerOctave); };
  constexpr double slack = 1e-14;

  // psi decreasing on (0,1), increasing on [1, inf).
  r.psi_monotone = true;
  for (int j = -n; j < 0 && r.psi_monotone; ++j) {
    const double lo = psi.lower(grid(j));
    const double hi = (j + 1 < 0) ? psi.lower(grid(j + 1)) : psi.lower(1.0);
    if (hi > lo * (1.0 + slack)) r.psi_monotone = false;
  }
  for (int j = 0; j < n && r.psi_monotone; ++j) {
    if (psi.upper(grid(j + 1)) < psi.upper(grid(j)) * (1.0 - slack)) r.psi_monotone = false;
  }

  // Dyadic sum over |k| <= 64 plus tail bounds.
  double partial = 0.0;
  bool positive = true;
  for (int k = -detail::kTailCut; k < detail::kTailCut; ++k) {
    const double v = psi.level_infimum(k);
    if (!(v > 0.0) || !std::isfinite(v)) {
      positive = false;
      break;
    }
    partial += 1.0 / v;
  }
  double tail = kInf;
  if (positive) {
    if (spec.psi.tabulated()) {
      // Beyond the table psi is a power law t^beta, so the dyadic terms are
      // geometric with ratio 2^{-beta} (upper) and 2^{beta_low} (lower).
      const double beta_hi = psi.table.high_slope();
      const double beta_lo = psi.table.low_slope();
      if (beta_hi > 0.0 && beta_lo < 0.0) {
        const double r_hi = std::exp2(-beta_hi);
        const double r_lo = std::exp2(beta_lo);
        const double last_hi = 1.0 / psi.level_infimum(detail::kTailCut - 1);
        const double last_lo = 1.0 / psi.level_infimum(-detail::kTailCut);
        tail = last_hi * r_hi / (1.0 - r_hi) + last_lo * r_lo / (1.0 - r_lo);
      }
    } else {
      tail = spec.psi.upper.tail_bound(detail::kTailCut - 1) +
             spec.psi.lower.tail_bound(detail::kTailCut - 1);
    }
  }
  r.psi_tail_finite = positive && std::isfinite(tail);
  r.s_psi = r.psi_tail_finite ? partial + tail : kInf;

  // phi increasing on [1, inf) with a finite dyadic sum.
  r.phi_monotone = true;
  for (int j = 0; j < n && r.phi_monotone; ++j) {
    if (spec.phi(grid(j + 1)) < spec.phi(grid(j)) * (1.0 - slack)) r.phi_monotone = false;
  }
  double phi_partial = 0.0;
  for (int k = 0; k < detail::kTailCut; ++k) phi_partial += 1.0 / spec.phi.at_pow2(k);
  const double phi_tail = spec.phi.tail_bound(detail::kTailCut - 1);
  r.phi_tail_finite = std::isfinite(phi_tail) && spec.phi(1.0) > 0.0;
  r.s_phi = r.phi_tail_finite ? phi_partial + phi_tail : kInf;

  double log_growth = -kInf;
  for (int j = 0; j <= n; ++j) {
    const double t = grid(j);
    log_growth = std::max(log_growth, std::log(psi.upper(t)) - std::sqrt(t));
  }
  r.growth_constant = std::exp(log_growth);

  if (!r.psi_monotone) {
    r.failure = "psi monotonicity (decreasing on (0,1), increasing on (1,inf))";
  } else if (!r.psi_tail_finite) {
    r.failure = "psi dyadic tail sum S_psi diverges";
  } else if (!r.phi_monotone) {
    r.failure = "phi monotonicity (increasing on (1,inf))";
  } else if (!r.phi_tail_finite) {
    r.failure = "phi dyadic tail sum S_phi diverges";
  }
  r.admissible = r.failure.empty();
  return r;
}

/// An admissible bump specification with its certified constants.
class Bump {
 public:
  explicit Bump(BumpSpec spec) : spec_(std::move(spec)) {
    report_ = check_bump(spec_);
    if (!report_.admissible) throw inadmissible_bump("inadmissible bump: " + report_.failure, report_);
    if (spec_.psi.tabulated()) table_ = LogLogTable(spec_.psi.table);
  }

  [[nodiscard]] const BumpSpec& spec() const { return spec_; }
  [[nodiscard]] const BumpAdmissibility& admissibility() const { return report_; }
  [[nodiscard]] double s_psi() const { return report_.s_psi; }
  [[nodiscard]] double s_phi() const { return report_.s_phi; }

  [[nodiscard]] double psi(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("psi: t must be positive");
    if (spec_.psi.tabulated()) return table_(t);
    return t < 1.0 ? spec_.psi.lower(1.0 / t) : spec_.psi.upper(t);
  }

  [[nodiscard]] double phi(double t) const {
    if (!(t >= 1.0) || !std::isfinite(t)) throw std::domain_error("phi: t must be at least 1");
    return spec_.phi(t);
  }

  /// nu_p(t) = psi(t) phi^{p-1}(psi(t)) for t < 1 and psi(t) for t >= 1.
  [[nodiscard]] double nu(double p, double t) const {
    const double s = psi(t);
    if (t >= 1.0) return s;
    return s * std::pow(phi(s), p - 1.0);
  }

  /// Infimum of psi over (2^k, 2^{k+1}].
  [[nodiscard]] double psi_level_infimum(int k) const {
    detail::PsiEval e(spec_.psi);
    return e.level_infimum(k);
  }

 private:
  BumpSpec spec_;
  BumpAdmissibility report_;
  LogLogTable table_;
};

}  // namespace sbump
