#pragma once

// Shared numerical helpers: error types, pairwise summation, a reproducible
// random source, adaptive Gauss-Kronrod quadrature and monotone cubic
// interpolation.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbump {

/// Raised when a numerical procedure fails to converge or overflows.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's documented precondition is violated.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kEuler = 2.718281828459045235360287;

/// Tree-structured summation. Rounding error grows with log2(n), not n.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    // Keep exact pairing for power-of-two lengths so that sums match the
    // bottom-up cube tables bit for bit.
    if ((v.size() & (v.size() - 1)) == 0 && v.size() > 1) {
      std::array<double, 8> buf{};
      std::size_t n = v.size();
      std::copy(v.begin(), v.end(), buf.begin());
      while (n > 1) {
        for (std::size_t i = 0; i < n / 2; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
        n /= 2;
      }
      return buf[0];
    }
    return s;
  }
  const std::size_t half = std::bit_floor(v.size() - 1);
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline bool approx_equal(double a, double b, double rel_tol, double abs_tol = 0.0) {
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)));
}

inline double relative_error(double value, double reference) {
  if (reference == 0.0) return std::abs(value);
  return std::abs(value - reference) / std::abs(reference);
}

/// Seeded random source. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the distributions are implemented here because
/// the standard library ones are implementation-defined and would break
/// byte-for-byte reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal via Box-Muller (one value per call; no caching so the
  /// stream position depends only on the number of calls).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

struct GkEstimate {
  double value;
  double error;
};

template <class F>
GkEstimate gauss_kronrod15(F&& f, double a, double b) {
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * xk[i];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    kron += wk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += wg[i / 2] * (f1 + f2);
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

template <class F>
double adaptive_gk(F& f, double a, double b, double abs_tol, double rel_tol, int depth,
                   std::size_t& budget, const GkEstimate& whole) {
  const double m = 0.5 * (a + b);
  const GkEstimate left = gauss_kronrod15(f, a, m);
  const GkEstimate right = gauss_kronrod15(f, m, b);
  const double sum = left.value + right.value;
  const double err = left.error + right.error;
  if (budget == 0) throw numeric_error("adaptive quadrature: evaluation budget exhausted");
  --budget;
  if (depth <= 0 || err <= std::max(abs_tol, rel_tol * std::abs(sum)) ||
      std::abs(sum - whole.value) <= 1e-15 * std::abs(sum)) {
    return sum;
  }
  return adaptive_gk(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, budget, left) +
         adaptive_gk(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, budget, right);
}

}  // namespace detail

/// Adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
template <class F>
double integrate(F f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0,
                 int max_depth = 40) {
  if (!(b > a)) return 0.0;
  std::size_t budget = 200000;
  const detail::GkEstimate whole = detail::gauss_kronrod15(f, a, b);
  if (!std::isfinite(whole.value)) return whole.value;
  if (whole.error <= std::max(abs_tol, 1e-3 * rel_tol * std::abs(whole.value)) && whole.value != 0.0) {
    return whole.value;
  }
  return detail::adaptive_gk(f, a, b, abs_tol, rel_tol, max_depth, budget, whole);
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson) on
/// strictly increasing knots. Outside the knot range it extends linearly
/// with the end slope.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching knots");
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("MonotoneCubic: knots must increase");
      delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    }
    m_.assign(n, 0.0);
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        m_[i] = 0.0;
      } else {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double w1 = 2.0 * h1 + h0;
        const double w2 = h1 + 2.0 * h0;
        m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    end_slope_lo_ = delta.front();
    end_slope_hi_ = delta.back();
  }

  double operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front() + end_slope_lo_ * (x - x_.front());
    if (x >= x_.back()) return y_.back() + end_slope_hi_ * (x - x_.back());
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    const std::size_t j = std::min(i, n - 2);
    const double h = x_[j + 1] - x_[j];
    const double s = (x - x_[j]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y_[j] + (s3 - 2 * s2 + s) * h * m_[j] +
           (-2 * s3 + 3 * s2) * y_[j + 1] + (s3 - s2) * h * m_[j + 1];
  }

  [[nodiscard]] bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, m_;
  double end_slope_lo_ = 0.0, end_slope_hi_ = 0.0;
};

/// Piecewise-linear extension through log-log knots, used for tabulated
/// bump and Young functions.
class LogLogTable {
 public:
  LogLogTable() = default;
  explicit LogLogTable(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("tabulated function needs at least 2 points");
    for (const auto& [t, v] : points) {
      if (!(t > 0.0) || !(v > 0.0) || !std::isfinite(t) || !std::isfinite(v)) {
        throw std::invalid_argument("tabulated function: points must be positive and finite");
      }
      if (!lx_.empty() && !(std::log(t) > lx_.back())) {
        throw std::invalid_argument("tabulated function: abscissae must strictly increase");
      }
      lx_.push_back(std::log(t));
      ly_.push_back(std::log(v));
    }
  }

  /// log f(e^u).
  [[nodiscard]] double log_at_log(double u) const {
    const std::size_t n = lx_.size();
    std::size_t j;
    if (u <= lx_.front()) {
      j = 0;
    } else if (u >= lx_.back()) {
      j = n - 2;
    } else {
      j = static_cast<std::size_t>(std::upper_bound(lx_.begin(), lx_.end(), u) - lx_.begin()) - 1;
      j = std::min(j, n - 2);
    }
    const double slope = (ly_[j + 1] - ly_[j]) / (lx_[j + 1] - lx_[j]);
    return ly_[j] + slope * (u - lx_[j]);
  }

  [[nodiscard]] double operator()(double t) const { return std::exp(log_at_log(std::log(t))); }

  /// Log-log slopes of the first and last segments; the function behaves
  /// like a power t^slope beyond the table.
  [[nodiscard]] double low_slope() const { return (ly_[1] - ly_[0]) / (lx_[1] - lx_[0]); }
  [[nodiscard]] double high_slope() const {
    const std::size_t n = lx_.size();
    return (ly_[n - 1] - ly_[n - 2]) / (lx_[n - 1] - lx_[n - 2]);
  }

 private:
  std::vector<double> lx_, ly_;
};

}  // namespace sbump
