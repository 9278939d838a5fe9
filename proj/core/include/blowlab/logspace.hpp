#pragma once

#include <cmath>
#include <limits>

namespace blowlab {

// A positive quantity carried as its natural logarithm. The magnitudes that
// matter here (F(u), T - t) underflow a double long before the dynamics end,
// so every comparative quantity travels in log space and is exponentiated
// only at the edges, where the caller has checked representability.
//
// +inf / -inf are honest sentinels for 0 and infinity of the underlying
// quantity (log 0 = -inf, log inf = +inf).
struct LogValue {
  double log_magnitude = std::numeric_limits<double>::quiet_NaN();

  static LogValue from_log(double lg) { return LogValue{lg}; }
  static LogValue from_linear(double x) { return LogValue{std::log(x)}; }
  static LogValue zero() { return LogValue{-std::numeric_limits<double>::infinity()}; }
  static LogValue infinity() { return LogValue{std::numeric_limits<double>::infinity()}; }

  // Linear value; underflows to 0 / overflows to inf outside [-745, 710].
  double value() const { return std::exp(log_magnitude); }

  bool is_zero() const { return std::isinf(log_magnitude) && log_magnitude < 0; }
  bool is_infinite() const { return std::isinf(log_magnitude) && log_magnitude > 0; }
  bool finite() const { return std::isfinite(log_magnitude); }
};

// Neumaier-compensated accumulator. Used wherever many same-scale increments
// are summed (time accumulation between snapshots, quadrature sums).
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

} // namespace blowlab
