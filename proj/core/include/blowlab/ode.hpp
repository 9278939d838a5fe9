#pragma once

#include <vector>

#include "blowlab/logspace.hpp"
#include "blowlab/nonlinearity.hpp"

namespace blowlab {

// The spatially homogeneous blow-up oracle y' = f(y). Its solution is
// y(t) = F^{-1}(T - t) with T = F(y0), which pins the exact blow-up time;
// the adaptive integrator below exists purely for differential testing
// against that closed form.

struct OdeSample {
  double t = 0.0;        // T - gap, saturates once gap < eps * T
  double y = 0.0;
  double log_gap = 0.0;  // log(T - t), exact bookkeeping deep into the run
};

struct OdeRun {
  double y0 = 0.0;
  double T = 0.0;        // = F(y0)
  double log_T = 0.0;
  std::vector<OdeSample> samples;
  int accepted_steps = 0;
  int rejected_steps = 0;
};

// T = F(y0), in log form (always finite) with a linear companion.
LogValue ode_blowup_time_log(const Nonlinearity& nl, double y0);
double ode_blowup_time(const Nonlinearity& nl, double y0);

// y(t) = F^{-1}(T - t); t must lie in [0, T). Near t = T the gap is formed
// from log T + log1p(-t/T), but a linear t cannot express gaps below
// eps * T; use ode_exact_loggap for that regime.
double ode_exact(const Nonlinearity& nl, double y0, double t);

// y at a remaining lifetime of exp(log_gap); valid for any log_gap < log T.
double ode_exact_loggap(const Nonlinearity& nl, double y0, double log_gap);

// Embedded Cash-Karp 4(5) integration of y' = f(y) from y0 until
// y >= stop_value, step-capped by half the remaining lifetime F(y) so the
// solver cannot overshoot past blow-up. The remaining lifetime is tracked
// directly (gap -= dt), which stays exact long after t itself saturates.
OdeRun ode_integrate(const Nonlinearity& nl, double y0, double stop_value,
                     double rel_tol);

} // namespace blowlab
