#pragma once

#include <functional>
#include <span>
#include <vector>

namespace blowlab {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
  int panels = 0;
};

// Adaptive Gauss-Kronrod 7-15 on [a, b]. Bisects the worst panel until the
// summed Kronrod-Gauss discrepancy meets max(abs_tol, rel_tol * |I|), or the
// panel budget runs out (converged = false in that case, value still best).
QuadResult gauss_kronrod_adaptive(const std::function<double(double)>& f,
                                  double a, double b,
                                  double rel_tol, double abs_tol,
                                  int max_panels = 4000);

// Composite Simpson over uniformly spaced samples; sample count must be odd.
double simpson_uniform(std::span<const double> samples, double dx);

} // namespace blowlab
