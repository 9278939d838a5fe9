#include "blowlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "blowlab/logspace.hpp"

namespace blowlab {
namespace {

// QUADPACK dqk15 nodes and weights (positive half of [-1, 1]).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double a, b;
  double kronrod;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double pair = (i == 7) ? fv[7] : fv[i] + fv[14 - i];
    kron += kWgk[i] * pair;
  }
  for (int i = 0; i < 4; ++i) {
    const int j = 2 * i + 1;
    const double pair = (j == 7) ? fv[7] : fv[j] + fv[14 - j];
    gauss += kWg[i] * pair;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.kronrod = kron * h;
  p.error = std::abs((kron - gauss) * h);
  return p;
}

} // namespace

QuadResult gauss_kronrod_adaptive(const std::function<double(double)>& f,
                                  double a, double b,
                                  double rel_tol, double abs_tol,
                                  int max_panels) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> panels;
  panels.push(evaluate_panel(f, a, b));
  double total = panels.top().kronrod;
  double err = panels.top().error;
  int count = 1;
  while (count < max_panels) {
    const double target = std::max(abs_tol, rel_tol * std::abs(total));
    if (err <= target) break;
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at rounding resolution; cannot refine further.
      panels.push(worst);
      break;
    }
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    total += left.kronrod + right.kronrod - worst.kronrod;
    err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Recompute the sum compensated; the incremental updates above can drift.
  CompensatedSum value, error;
  while (!panels.empty()) {
    value.add(panels.top().kronrod);
    error.add(panels.top().error);
    panels.pop();
  }
  out.value = value.value();
  out.abs_error = error.value();
  out.panels = count;
  out.converged =
      out.abs_error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

double simpson_uniform(std::span<const double> samples, double dx) {
  const size_t m = samples.size();
  if (m < 3 || m % 2 == 0) {
    throw std::invalid_argument("simpson_uniform: need an odd sample count >= 3");
  }
  CompensatedSum acc;
  acc.add(samples[0]);
  acc.add(samples[m - 1]);
  for (size_t i = 1; i + 1 < m; ++i) {
    acc.add(samples[i] * (i % 2 == 1 ? 4.0 : 2.0));
  }
  return acc.value() * dx / 3.0;
}

} // namespace blowlab
