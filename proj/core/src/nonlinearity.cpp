#include "blowlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowlab/errors.hpp"
#include "blowlab/quadrature.hpp"

namespace blowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear-form guard: exp() of anything above this is an overflow error in
// the linear APIs (the log APIs never hit it).
constexpr double kMaxExpArg = 709.0;

// x = u^p at and above which the Legendre continued fraction for
// Gamma(a, x) is used. Below it a power series + fixed quadrature segment
// takes over; the CF converges too slowly near small x.
constexpr double kCfSwitch = 2.0;

double checked_exp(double lg, const char* what) {
  if (lg > kMaxExpArg) {
    std::ostringstream os;
    os << what << ": linear-form overflow (log value " << lg
       << " > " << kMaxExpArg << "); use the log-space API";
    throw NumericalError(os.str());
  }
  return std::exp(lg);
}

// s^p - u^p for s >= u > 0 without cancellation when s is near u.
double pow_gap(double s, double u, double p) {
  if (u <= 0.0) return std::pow(s, p);
  const double ratio = (s - u) / u;
  if (ratio < 1.0) {
    return std::pow(u, p) * std::expm1(p * std::log1p(ratio));
  }
  return std::pow(s, p) - std::pow(u, p);
}

} // namespace

Nonlinearity::Nonlinearity(double p, double q, Family family)
    : p_(p), q_(q), family_(family) {
  switch (family) {
    case Family::SuperExponential:
      if (!(p > 1.0)) {
        throw ConfigError("nonlinearity: super_exponential requires p > 1");
      }
      if (!(q == 0.0 || q >= 1.0)) {
        throw ConfigError("nonlinearity: super_exponential requires q = 0 or q >= 1");
      }
      break;
    case Family::PureExponentialReference:
      if (p != 1.0 || q != 0.0) {
        throw ConfigError("nonlinearity: pure_exponential_reference is (p,q) = (1,0)");
      }
      break;
    case Family::PowerReference:
      if (!(p > 1.0)) {
        throw ConfigError("nonlinearity: power_reference requires p > 1");
      }
      if (q != 0.0) {
        throw ConfigError("nonlinearity: power_reference takes q = 0");
      }
      break;
  }
}

std::string Nonlinearity::family_name() const {
  switch (family_) {
    case Family::SuperExponential: return "super_exponential";
    case Family::PureExponentialReference: return "pure_exponential_reference";
    case Family::PowerReference: return "power_reference";
  }
  return "unknown";
}

double Nonlinearity::log_f(double u) const {
  if (u < 0.0) throw DomainError("f: u must be nonnegative");
  switch (family_) {
    case Family::PureExponentialReference:
      return u;
    case Family::PowerReference:
      return u == 0.0 ? -kInf : p_ * std::log(u);
    case Family::SuperExponential:
      if (u == 0.0) return q_ > 0.0 ? -kInf : 0.0;
      return std::pow(u, p_) + q_ * std::log(u);
  }
  return 0.0;
}

double Nonlinearity::f(double u) const {
  const double lg = log_f(u);
  if (std::isinf(lg) && lg < 0) return 0.0;
  return checked_exp(lg, "f");
}

double Nonlinearity::log_f_prime(double u) const {
  if (u < 0.0) throw DomainError("f_prime: u must be nonnegative");
  switch (family_) {
    case Family::PureExponentialReference:
      return u;
    case Family::PowerReference:
      if (u == 0.0) return -kInf;
      return std::log(p_) + (p_ - 1.0) * std::log(u);
    case Family::SuperExponential: {
      if (u == 0.0) {
        if (q_ >= 1.0) {
          throw DomainError("f_prime: u = 0 with q >= 1 (the u^{-1} factor diverges)");
        }
        return -kInf; // q = 0, p > 1: f'(0) = 0
      }
      // f'(u) = (p u^{p-1} + q u^{-1}) e^{u^p} u^q
      const double prefactor = p_ * std::pow(u, p_ - 1.0) + q_ / u;
      return std::log(prefactor) + std::pow(u, p_) + q_ * std::log(u);
    }
  }
  return 0.0;
}

double Nonlinearity::f_prime(double u) const {
  const double lg = log_f_prime(u);
  if (std::isinf(lg) && lg < 0) return 0.0;
  return checked_exp(lg, "f_prime");
}

// Legendre continued fraction for the upper incomplete gamma, modified
// Lentz form; valid for x > 0 including a <= 0, efficient for x >= ~2.
double Nonlinearity::log_gamma_cf(double a, double x) const {
  constexpr double kTiny = 1e-290;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 800; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return -x + a * std::log(x) + std::log(h);
    }
  }
  throw NumericalError("incomplete gamma continued fraction failed to converge");
}

// int_{u1}^{u2} e^{-s^p} s^{-q} ds by expanding e^{-s^p}; requires
// u2^p <= ~0.7 so the alternating series converges fast. Handles the
// s^{-q} endpoint blow-up analytically (it is inside the antiderivative).
double Nonlinearity::series_segment(double u1, double u2) const {
  if (u2 <= u1) return 0.0;
  CompensatedSum total;
  double factorial = 1.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    const double expo = p_ * k - q_ + 1.0;
    double integral;
    if (std::abs(expo) < 1e-12) {
      integral = std::log(u2 / u1);
    } else {
      integral = (std::pow(u2, expo) - (u1 > 0.0 ? std::pow(u1, expo) : 0.0)) / expo;
    }
    const double term = ((k % 2 == 0) ? 1.0 : -1.0) * integral / factorial;
    total.add(term);
    if (k > 2 && std::abs(term) < 1e-17 * std::abs(total.value())) break;
  }
  return total.value();
}

double Nonlinearity::log_F_super(double u) const {
  const double a = (1.0 - q_) / p_;
  const double x = u > 0.0 ? std::pow(u, p_) : 0.0;

  if (u == 0.0) {
    if (q_ >= 1.0) return kInf;           // integrand ~ s^{-q} at 0
    // F(0) = Gamma(1/p) / p exactly.
    return std::lgamma(1.0 / p_) - std::log(p_);
  }
  if (x >= kCfSwitch) {
    return log_gamma_cf(a, x) - std::log(p_);
  }

  // Small u: integrate the original integrand up to c = kCfSwitch^{1/p} and
  // close with the continued-fraction tail. The stretch below s0 (where the
  // series for e^{-s^p} converges geometrically) is done analytically; the
  // smooth remainder [s0, c] by Gauss-Kronrod.
  const double c = std::pow(kCfSwitch, 1.0 / p_);
  const double s0 = std::min(c, std::pow(0.5, 1.0 / p_));
  CompensatedSum acc;
  if (u < s0) {
    acc.add(series_segment(u, s0));
  }
  const double lo = std::max(u, s0);
  if (lo < c) {
    auto integrand = [&](double s) {
      return std::exp(-std::pow(s, p_) - q_ * std::log(s));
    };
    QuadResult qr = gauss_kronrod_adaptive(integrand, lo, c, 1e-14, 0.0, 2000);
    if (!qr.converged) {
      throw NumericalError("log_F: quadrature segment failed to converge");
    }
    acc.add(qr.value);
  }
  acc.add(std::exp(log_gamma_cf(a, kCfSwitch) - std::log(p_)));
  return std::log(acc.value());
}

LogValue Nonlinearity::log_F(double u) const {
  if (u < 0.0) throw DomainError("F: u must be nonnegative");
  switch (family_) {
    case Family::PureExponentialReference:
      return LogValue::from_log(-u);
    case Family::PowerReference:
      if (u == 0.0) return LogValue::infinity();
      return LogValue::from_log((1.0 - p_) * std::log(u) - std::log(p_ - 1.0));
    case Family::SuperExponential:
      return LogValue::from_log(log_F_super(u));
  }
  return LogValue{};
}

double Nonlinearity::F(double u) const { return log_F(u).value(); }

double Nonlinearity::asymptotic_inverse(double log_y) const {
  if (log_y >= 0.0) throw DomainError("asymptotic_inverse: needs log y < 0");
  return std::pow(-log_y, 1.0 / p_);
}

double Nonlinearity::F_inverse_log(double log_y) const {
  switch (family_) {
    case Family::PureExponentialReference:
      if (log_y >= 0.0) {
        throw DomainError("F_inverse: log y must be < log F(0) = 0");
      }
      return -log_y;
    case Family::PowerReference:
      return std::exp((log_y + std::log(p_ - 1.0)) / (1.0 - p_));
    case Family::SuperExponential:
      break;
  }

  const double log_F0 = log_F(0.0).log_magnitude; // +inf when q >= 1
  if (!(log_y < log_F0)) {
    std::ostringstream os;
    os << "F_inverse: log y = " << log_y << " is not below log F(0) = " << log_F0;
    throw DomainError(os.str());
  }

  // Bracket the root of g(u) = log F(u) - log_y; log F is strictly decreasing.
  double lo = 0.0;
  double hi = log_y < -1.0 ? asymptotic_inverse(log_y) : 1.0;
  while (log_F(hi).log_magnitude > log_y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("F_inverse: failed to bracket root");
  }

  double u = std::clamp(log_y < -1.0 ? asymptotic_inverse(log_y) : 0.5 * (lo + hi),
                        lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = log_F(u).log_magnitude - log_y;
    if (g > 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    // (log F)'(u) = -1/(f F); the Newton step is g * f F.
    const double log_fF = log_f(u) + log_F(u).log_magnitude;
    double step = g * std::exp(log_fF);
    double next = u + step;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi); // bisection fallback
    }
    const double du = std::abs(next - u);
    u = next;
    if (du <= 1e-14 * std::max(1.0, u) || hi - lo <= 1e-14 * std::max(1.0, u)) {
      break;
    }
  }
  return u;
}

double Nonlinearity::threshold_l() const {
  if (family_ != Family::SuperExponential) {
    throw DomainError("threshold_l: defined for the super_exponential family");
  }
  if (q_ == 0.0) return 0.0; // the remainder integrand decreases on all of (0, inf)

  // Sign of d/ds (p(p-1)s^p - q)/(p s^p + q)^2 is the sign of
  // (p+1) q - p(p-1) s^p; bisect the sign change.
  auto decreasing_from = [&](double s) {
    return (p_ + 1.0) * q_ - p_ * (p_ - 1.0) * std::pow(s, p_) < 0.0;
  };
  double lo = 1e-8, hi = 1.0;
  while (!decreasing_from(hi)) hi *= 2.0;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (decreasing_from(mid) ? hi : lo) = mid;
  }
  const double l0 = hi;
  return std::max(l0, std::pow(q_ / (p_ * (p_ - 1.0)), 1.0 / p_));
}

double Nonlinearity::fprime_F(double u) const {
  switch (family_) {
    case Family::PureExponentialReference:
      return 1.0;
    case Family::PowerReference:
      return p_ / (p_ - 1.0);
    case Family::SuperExponential:
      break;
  }
  if (u < 0.0) throw DomainError("fprime_F: u must be nonnegative");
  if (u == 0.0) {
    if (q_ >= 1.0) {
      // q = 1: unbounded as u -> 0 (return the honest infinity);
      // q > 1: the limit is q/(q-1), but u = 0 itself is outside the domain
      // of f'; report the limit of the product.
      return q_ == 1.0 ? kInf : q_ / (q_ - 1.0);
    }
    return 0.0;
  }
  const double lg = log_f_prime(u) + log_F(u).log_magnitude;
  // f'F is bounded by max(1, q/(q-1)-ish) except q = 1 near 0; exp is safe
  // except in that honest divergence, which stays finite for u > 0.
  return std::exp(lg);
}

double Nonlinearity::one_minus_fprime_F(double u) const {
  switch (family_) {
    case Family::PureExponentialReference:
      return 0.0;
    case Family::PowerReference:
      return -1.0 / (p_ - 1.0);
    case Family::SuperExponential:
      break;
  }
  if (u < 0.0) throw DomainError("one_minus_fprime_F: u must be nonnegative");
  const double l = threshold_l();
  if (u < l || u == 0.0) {
    // Below l both factors are O(1) and the subtraction is well conditioned.
    return 1.0 - fprime_F(u);
  }
  {
    // While f'F is still well away from 1 the subtraction keeps full
    // accuracy and the remainder integral (whose integrand is ~1/s^{p}
    // singular towards small u when q = 0) does not.
    const double fpF = fprime_F(u);
    if (fpF < 0.9) return 1.0 - fpF;
  }

  // 1 - f'F = (p u^{p-1} + q/u) u^q * int_u^inf g(s) e^{-(s^p - u^p)} s^{-q} ds,
  // g(s) = (p(p-1)s^p - q)/(p s^p + q)^2 >= 0 for s >= l. The e^{-u^p}
  // factor of the integrand has been cancelled against f'(u) analytically,
  // so every piece here is a tame linear-space number.
  auto integrand = [&](double s) {
    const double sp = std::pow(s, p_);
    const double g = (p_ * (p_ - 1.0) * sp - q_) / ((p_ * sp + q_) * (p_ * sp + q_));
    return g * std::exp(-pow_gap(s, u, p_) - q_ * (std::log(s) - std::log(u)));
  };
  const double s_hi = std::pow(std::pow(u, p_) + 45.0, 1.0 / p_);
  QuadResult qr = gauss_kronrod_adaptive(integrand, u, s_hi, 1e-12, 0.0, 4000);
  if (!qr.converged) {
    throw NumericalError("one_minus_fprime_F: remainder quadrature failed");
  }
  // The u^q of f' and the s^{-q} of the integrand were merged into
  // (s/u)^{-q} above, so only the derivative prefactor remains.
  const double prefactor = p_ * std::pow(u, p_ - 1.0) + q_ / u;
  return prefactor * qr.value;
}

} // namespace blowlab
