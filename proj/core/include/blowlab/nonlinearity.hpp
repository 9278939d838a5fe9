#pragma once

#include <string>

#include "blowlab/logspace.hpp"

namespace blowlab {

enum class Family {
  SuperExponential,        // f(u) = e^{u^p} u^q, p > 1, q in {0} or [1, inf)
  PureExponentialReference, // f(u) = e^u, closed form F(u) = e^{-u}
  PowerReference,          // f(u) = u^p, closed form F(u) = u^{1-p}/(p-1)
};

// The reaction term f and its remaining-lifetime integral
//
//   F(u) = int_u^inf ds / f(s),
//
// which is the clock of the whole computation: for the space-free problem
// y' = f(y), F(y(t)) equals T - t exactly. For the super-exponential family
// the substitution t = s^p turns F into an upper incomplete gamma,
// F(u) = Gamma((1-q)/p, u^p) / p, whose parameter a = (1-q)/p may be <= 0;
// the Legendre continued fraction handles that for moderate-to-large u^p and
// a series + fixed Gauss-Kronrod segment covers small u.
//
// Everything that can underflow is exposed in log space: log F stays a
// friendly O(u^p) number while F itself dies at u ~ 709^{1/p}.
class Nonlinearity {
public:
  Nonlinearity(double p, double q, Family family);

  static Nonlinearity super_exponential(double p, double q) {
    return Nonlinearity(p, q, Family::SuperExponential);
  }
  static Nonlinearity pure_exponential() {
    return Nonlinearity(1.0, 0.0, Family::PureExponentialReference);
  }
  static Nonlinearity power(double p) {
    return Nonlinearity(p, 0.0, Family::PowerReference);
  }

  double p() const { return p_; }
  double q() const { return q_; }
  Family family() const { return family_; }
  std::string family_name() const;

  // f and f' in linear and log form. The linear forms overflow once
  // u^p + q log u > ~709; that is an error of the linear API only.
  double f(double u) const;
  double log_f(double u) const;        // u = 0, q >= 1: -inf sentinel
  double f_prime(double u) const;      // u = 0, q >= 1: domain error
  double log_f_prime(double u) const;

  // log F(u). Never over/underflows for u up to 1e3 and beyond; for q >= 1,
  // F(0) = +inf (sentinel).
  LogValue log_F(double u) const;
  double F(double u) const;            // linear convenience, may underflow

  // Inverse of F on its log scale: returns u with log F(u) = log_y.
  // Safeguarded Newton seeded by the small-y asymptote, bisection fallback.
  double F_inverse_log(double log_y) const;

  // Seed / diagnostic asymptote for the inverse: (-log y)^{1/p}.
  double asymptotic_inverse(double log_y) const;

  // f'(u) F(u), assembled in log space, and its distance from 1 computed
  // without catastrophic cancellation: for u >= threshold_l() the remainder
  // integral of the integration-by-parts identity
  //   F(u) = 1/f'(u) + int_u^inf (p(1-p)s^p + q)/(p s^p + q)^2 e^{-s^p} s^{-q} ds
  // is evaluated directly, so 1 - f'F ~ C/u^p keeps full relative accuracy
  // long after the subtraction 1 - f'F has lost every digit.
  double fprime_F(double u) const;
  double one_minus_fprime_F(double u) const;

  // The threshold l = l(p, q) beyond which f'(u)F(u) <= 1 and the remainder
  // integrand is monotone: max of (q/(p(p-1)))^{1/p} and the numerically
  // bisected onset of monotone decrease of (p(p-1)s^p - q)/(p s^p + q)^2.
  double threshold_l() const;

private:
  double log_F_super(double u) const;
  double log_gamma_cf(double a, double x) const; // log Gamma(a, x), x >= cf threshold
  double series_segment(double u1, double u2) const;

  double p_ = 0.0;
  double q_ = 0.0;
  Family family_ = Family::SuperExponential;
};

} // namespace blowlab
