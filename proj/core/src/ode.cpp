#include "blowlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowlab/errors.hpp"

namespace blowlab {

namespace {

// Cash-Karp 4(5) tableau.
constexpr double kA[6][5] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0},
    {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0},
    {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0,
     253.0 / 4096.0}};
constexpr double kB5[6] = {37.0 / 378.0,  0.0, 250.0 / 621.0,
                           125.0 / 594.0, 0.0, 512.0 / 1771.0};
constexpr double kB4[6] = {2825.0 / 27648.0,  0.0,           18575.0 / 48384.0,
                           13525.0 / 55296.0, 277.0 / 14336.0, 1.0 / 4.0};

} // namespace

LogValue ode_blowup_time_log(const Nonlinearity& nl, double y0) {
  if (!(y0 > 0.0)) throw DomainError("ode: y0 must be positive");
  return nl.log_F(y0);
}

double ode_blowup_time(const Nonlinearity& nl, double y0) {
  return ode_blowup_time_log(nl, y0).value();
}

double ode_exact_loggap(const Nonlinearity& nl, double y0, double log_gap) {
  const double log_T = ode_blowup_time_log(nl, y0).log_magnitude;
  if (!(log_gap <= log_T)) {
    throw DomainError("ode_exact: remaining lifetime exceeds T = F(y0)");
  }
  return nl.F_inverse_log(log_gap);
}

double ode_exact(const Nonlinearity& nl, double y0, double t) {
  const double log_T = ode_blowup_time_log(nl, y0).log_magnitude;
  const double T = std::exp(log_T);
  if (t == 0.0) return y0;
  if (!(t > 0.0) || !(t < T)) {
    std::ostringstream os;
    os << "ode_exact: t = " << t << " outside [0, T) with T = " << T;
    throw DomainError(os.str());
  }
  const double log_gap = log_T + std::log1p(-t / T);
  return nl.F_inverse_log(log_gap);
}

OdeRun ode_integrate(const Nonlinearity& nl, double y0, double stop_value,
                     double rel_tol) {
  if (!(stop_value > y0)) throw DomainError("ode_integrate: stop_value must exceed y0");
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-3)) {
    throw DomainError("ode_integrate: rel_tol must lie in [1e-12, 1e-3]");
  }
  // Guard the linear-space reaction evaluations up front.
  (void)nl.f(stop_value);

  OdeRun run;
  run.y0 = y0;
  run.log_T = ode_blowup_time_log(nl, y0).log_magnitude;
  run.T = std::exp(run.log_T);

  double y = y0;
  double gap = run.T; // remaining lifetime T - t
  double dt = 0.01 * gap;
  double prev_scaled_err = 1.0;

  auto record = [&](double yy, double gg) {
    OdeSample s;
    s.y = yy;
    s.log_gap = std::log(gg);
    s.t = run.T - gg;
    run.samples.push_back(s);
  };
  record(y, gap);

  const int max_steps = 20'000'000;
  for (int step = 0; step < max_steps; ++step) {
    if (y >= stop_value) {
      run.accepted_steps = step;
      return run;
    }
    const double lifetime = nl.F(y);
    dt = std::min(dt, 0.5 * lifetime);
    if (!(dt > 0.0) || dt < 1e-300) {
      std::ostringstream os;
      os << "ode_integrate: step size underflow at y = " << y
         << ", t = " << run.T - gap << ", gap = " << gap << ", dt = " << dt;
      throw NumericalError(os.str());
    }

    double k[6];
    k[0] = nl.f(y);
    bool stage_ok = true;
    for (int i = 1; i < 6; ++i) {
      double yi = y;
      for (int j = 0; j < i; ++j) yi += dt * kA[i][j] * k[j];
      if (!(yi >= 0.0) || !std::isfinite(yi)) {
        stage_ok = false;
        break;
      }
      k[i] = nl.f(yi);
    }
    if (!stage_ok) {
      dt *= 0.25;
      ++run.rejected_steps;
      continue;
    }
    double y5 = y, y4 = y;
    for (int i = 0; i < 6; ++i) {
      y5 += dt * kB5[i] * k[i];
      y4 += dt * kB4[i] * k[i];
    }
    const double scale = rel_tol * std::max(std::abs(y), std::abs(y5)) + rel_tol * y0;
    const double err = std::abs(y5 - y4) / scale;
    if (err <= 1.0 || dt <= 1e-6 * lifetime) {
      y = y5;
      gap -= dt;
      record(y, std::max(gap, 1e-300));
      // PI controller (order-5 exponents).
      const double grow =
          0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
          std::pow(prev_scaled_err, 0.4 / 5.0);
      prev_scaled_err = std::max(err, 1e-10);
      dt *= std::clamp(grow, 0.2, 5.0);
    } else {
      ++run.rejected_steps;
      dt *= std::max(0.1, 0.9 * std::pow(err, -0.25));
    }
  }
  throw NumericalError("ode_integrate: step budget exhausted before stop_value");
}

} // namespace blowlab
