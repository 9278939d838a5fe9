#include "blowlab/selfsimilar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blowlab/errors.hpp"
#include "blowlab/quadrature.hpp"

namespace blowlab {

namespace {

double rho(double y) { return std::exp(-0.25 * y * y); }

// Centered first derivative on a uniform grid, one-sided at the ends.
std::vector<double> d_dy(std::span<const double> f, double dy) {
  const size_t m = f.size();
  std::vector<double> out(m);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dy);
  for (size_t j = 1; j + 1 < m; ++j) out[j] = (f[j + 1] - f[j - 1]) / (2.0 * dy);
  out[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * dy);
  return out;
}

} // namespace

double sphere_surface(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

SelfSimilarFrame to_frame(const Snapshot& snap, const RadialGrid& grid,
                          double log_gap, double alpha, int y_resolution,
                          double y_max_cap, BoundaryMode mode) {
  const double s = -log_gap;
  if (!(s > 0.0)) {
    throw DomainError("to_frame: snapshot too early (s <= 0)");
  }
  // Interpolable radius range; the boundary node is excluded when it lives
  // in u-space (its Phi is the -inf sentinel).
  const int j_hi = mode == BoundaryMode::USpace ? grid.J - 1 : grid.J;
  std::vector<double> r(j_hi + 1), phi(j_hi + 1);
  for (int j = 0; j <= j_hi; ++j) {
    r[j] = grid.r(j);
    phi[j] = snap.phi[j];
  }
  MonotoneCubic phi_of_r = radial_interpolant(r, phi);

  const double scale = std::exp(-0.5 * s); // sqrt(T - t)
  double extent = std::pow(s, alpha);
  const double omega_extent = r[j_hi] / scale;
  bool truncated = false;
  if (omega_extent < extent) {
    extent = omega_extent;
    truncated = true;
  }
  if (y_max_cap > 0.0 && y_max_cap < extent) {
    extent = y_max_cap;
    truncated = true;
  }
  if (!(extent > 0.0)) {
    throw DomainError("to_frame: requested y range lies beyond Omega(s)");
  }

  int m = std::max(9, y_resolution);
  if (m % 2 == 0) ++m;

  SelfSimilarFrame frame;
  frame.s = s;
  frame.alpha = alpha;
  frame.source_t = snap.t;
  frame.n = grid.n;
  frame.extent_truncated = truncated;
  frame.y.resize(m);
  frame.v.resize(m);
  const double dy = extent / (m - 1);
  for (int j = 0; j < m; ++j) {
    frame.y[j] = j * dy;
    const double rr = std::min(frame.y[j] * scale, r[j_hi]);
    frame.v[j] = std::exp(phi_of_r(rr) - s);
  }
  return frame;
}

double residual_veq(const SelfSimilarFrame& prev, const SelfSimilarFrame& mid,
                    const SelfSimilarFrame& next, const CoefficientTable& coeff) {
  if (!(prev.s < mid.s && mid.s < next.s)) {
    throw DomainError("residual_veq: frames must be strictly s-ordered");
  }
  MonotoneCubic v_prev = radial_interpolant(prev.y, prev.v);
  MonotoneCubic v_next = radial_interpolant(next.y, next.v);
  const double common = std::min({prev.extent(), mid.extent(), next.extent(),
                                  std::pow(mid.s, mid.alpha)});
  const double dy = mid.dy();
  const double ds = next.s - prev.s;
  const size_t m = mid.y.size();

  const std::vector<double> vy = d_dy(mid.v, dy);
  double worst = 0.0;
  for (size_t j = 1; j + 1 < m; ++j) {
    const double y = mid.y[j];
    if (y > common) break;
    const double v = mid.v[j];
    double lap = (mid.v[j + 1] - 2.0 * v + mid.v[j - 1]) / (dy * dy);
    if (mid.n > 1) lap += (mid.n - 1) / y * vy[j];
    const double vs = (v_next(y) - v_prev(y)) / ds;
    const double grad2 = vy[j] * vy[j];
    const double c = coeff(mid.s + std::log(v));
    const double res = vs - (lap - 0.5 * y * vy[j] - grad2 / v + v * v - v +
                             (grad2 / v) * c);
    worst = std::max(worst, std::abs(res) * rho(y));
  }
  { // center node: symmetry rule, gradient terms vanish
    const double v = mid.v[0];
    const double lap = 2.0 * mid.n * (mid.v[1] - v) / (dy * dy);
    const double vs = (v_next(0.0) - v_prev(0.0)) / ds;
    const double res = vs - (lap + v * v - v);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double residual_veq_nodal(const Snapshot& early, const Snapshot& mid,
                          const Snapshot& late, const RadialGrid& grid,
                          double log_gap_early, double log_gap_mid,
                          double log_gap_late, double alpha,
                          const CoefficientTable& coeff) {
  const double s1 = -log_gap_early, s2 = -log_gap_mid, s3 = -log_gap_late;
  if (!(s1 < s2 && s2 < s3)) {
    throw DomainError("residual_veq_nodal: snapshots must be strictly s-ordered");
  }
  const double scale2 = std::exp(0.5 * s2);
  const double H = grid.h() * scale2; // image grid spacing
  const double b = std::pow(s2, alpha);
  int j_max = static_cast<int>(std::floor(b / H));
  j_max = std::min(j_max, grid.J - 1);
  if (j_max < 3) throw DomainError("residual_veq_nodal: window under-resolved");

  auto v_of = [](const Snapshot& snap, double s, int j) {
    return std::exp(snap.phi[j] - s);
  };
  double worst = 0.0;
  for (int j = 0; j < j_max; ++j) {
    const double y = j * H;
    const double v = v_of(mid, s2, j);
    double lap, vy;
    if (j == 0) {
      lap = 2.0 * grid.n * (v_of(mid, s2, 1) - v) / (H * H);
      vy = 0.0;
    } else {
      const double vp = v_of(mid, s2, j + 1);
      const double vm = v_of(mid, s2, j - 1);
      lap = (vp - 2.0 * v + vm) / (H * H) + (grid.n - 1) / y * (vp - vm) / (2.0 * H);
      vy = (vp - vm) / (2.0 * H);
    }
    // d/ds at fixed source radius equals v_s + (y/2) v_y, so the drift term
    // of the equation cancels exactly against the moving observation point.
    const double dv_fixed_r = (v_of(late, s3, j) - v_of(early, s1, j)) / (s3 - s1);
    const double grad2 = vy * vy;
    const double c = coeff(mid.phi[j]);
    const double res =
        dv_fixed_r - (lap - grad2 / v + v * v - v + (grad2 / v) * c);
    worst = std::max(worst, std::abs(res) * rho(y));
  }
  return worst;
}

EnergyRecord energy(const SelfSimilarFrame& frame, const SelfSimilarFrame& prev,
                    const SelfSimilarFrame& next, const CoefficientTable& coeff) {
  if (!(prev.s < frame.s && frame.s < next.s)) {
    throw DomainError("energy: companion frames must bracket the frame in s");
  }
  const size_t m = frame.y.size();
  const double dy = frame.dy();
  const double omega = sphere_surface(frame.n);
  const double ds = next.s - prev.s;

  MonotoneCubic v_prev = radial_interpolant(prev.y, prev.v);
  MonotoneCubic v_next = radial_interpolant(next.y, next.v);
  const double vs_extent = std::min(prev.extent(), next.extent());

  EnergyRecord rec;
  rec.s = frame.s;
  rec.vs_truncated = vs_extent < frame.extent();

  const std::vector<double> vy = d_dy(frame.v, dy);
  std::vector<double> w_dirichlet(m), w_potential(m), w_hsq(m), w_vs(m);
  std::vector<double> vs(m, 0.0);
  for (size_t j = 0; j < m; ++j) {
    const double y = frame.y[j];
    const double v = frame.v[j];
    const double weight = omega * (frame.n > 1 ? std::pow(y, frame.n - 1) : 1.0) * rho(y);
    const double ratio = vy[j] / v;
    if (y <= vs_extent) vs[j] = (v_next(y) - v_prev(y)) / ds;
    const double c = coeff(frame.s + std::log(v));
    w_dirichlet[j] = 0.5 * ratio * ratio * weight;
    w_potential[j] = (v - std::log(v)) * weight;
    w_hsq[j] = 0.5 * ratio * ratio * ratio * ratio * c * c * weight;
    w_vs[j] = 0.5 * (vs[j] / v) * (vs[j] / v) * weight;
  }
  rec.dirichlet_part = simpson_uniform(w_dirichlet, dy);
  rec.potential_part = simpson_uniform(w_potential, dy);
  rec.E = rec.dirichlet_part - rec.potential_part;
  rec.h_second_term = simpson_uniform(w_hsq, dy);
  rec.vs_integral = simpson_uniform(w_vs, dy);

  // Boundary term of the dissipation identity, evaluated at y = b:
  //   G = oint (v_s/v^2) dv/dnu rho dS
  //       + (alpha/s) oint (1/2 (v_y/v)^2 - v + log v)(y.nu) rho dS.
  {
    const size_t j = m - 1;
    const double b = frame.y[j];
    const double v = frame.v[j];
    const double surf = omega * (frame.n > 1 ? std::pow(b, frame.n - 1) : 1.0) * rho(b);
    const double vs_b = b <= vs_extent ? (v_next(b) - v_prev(b)) / ds : 0.0;
    const double ratio = vy[j] / v;
    rec.G_boundary =
        surf * ((vs_b / (v * v)) * vy[j] +
                (frame.alpha / frame.s) * b *
                    (0.5 * ratio * ratio - v + std::log(v)));
  }
  rec.H = rec.G_boundary + rec.h_second_term;
  return rec;
}

std::vector<IntervalLedgerEntry> energy_inequality_check(
    std::span<const EnergyRecord> records, std::span<const double> slack) {
  if (records.size() < 2) {
    throw DomainError("energy_inequality_check: need >= 2 records");
  }
  if (slack.size() != records.size() - 1) {
    throw DomainError("energy_inequality_check: need one slack per interval");
  }
  std::vector<IntervalLedgerEntry> out;
  out.reserve(records.size() - 1);
  for (size_t k = 0; k + 1 < records.size(); ++k) {
    const EnergyRecord& a = records[k];
    const EnergyRecord& b = records[k + 1];
    IntervalLedgerEntry e;
    e.s_lo = a.s;
    e.s_hi = b.s;
    e.lhs = 0.5 * (a.vs_integral + b.vs_integral);
    e.energy_drop = (a.E - b.E) / (b.s - a.s);
    e.H_mid = 0.5 * (a.H + b.H);
    e.slack = slack[k];
    e.pass = e.lhs <= e.energy_drop + e.H_mid + e.slack;
    out.push_back(e);
  }
  return out;
}

std::vector<IntervalLedgerEntry> energy_inequality_check(
    std::span<const EnergyRecord> records, double slack) {
  if (records.size() < 2) {
    throw DomainError("energy_inequality_check: need >= 2 records");
  }
  const std::vector<double> uniform(records.size() - 1, slack);
  return energy_inequality_check(records, uniform);
}

StationaryIdentity stationary_identity(const SelfSimilarFrame& frame) {
  const size_t m = frame.y.size();
  const double dy = frame.dy();
  const double omega = sphere_surface(frame.n);
  const std::vector<double> vy = d_dy(frame.v, dy);
  std::vector<double> moment(m), mass(m);
  for (size_t j = 0; j < m; ++j) {
    const double y = frame.y[j];
    const double ratio = vy[j] / frame.v[j];
    const double weight = omega * (frame.n > 1 ? std::pow(y, frame.n - 1) : 1.0) * rho(y);
    mass[j] = ratio * ratio * weight;
    moment[j] = 0.25 * ratio * ratio * y * y * weight;
  }
  StationaryIdentity id;
  id.gradient_moment = simpson_uniform(moment, dy);
  id.gradient_mass = simpson_uniform(mass, dy);
  id.residual = id.gradient_moment + 0.5 * (2.0 - frame.n) * id.gradient_mass;
  return id;
}

namespace {

double leibniz_g(LeibnizTestFunction fn, double y, double s) {
  switch (fn) {
    case LeibnizTestFunction::One: return 1.0;
    case LeibnizTestFunction::Gaussian: return rho(y);
    case LeibnizTestFunction::PolyGaussian: return s * y * y * rho(y);
  }
  return 0.0;
}

double leibniz_gs(LeibnizTestFunction fn, double y, double /*s*/) {
  switch (fn) {
    case LeibnizTestFunction::One: return 0.0;
    case LeibnizTestFunction::Gaussian: return 0.0;
    case LeibnizTestFunction::PolyGaussian: return y * y * rho(y);
  }
  return 0.0;
}

double ball_integral(LeibnizTestFunction fn, double alpha, double s, int n,
                     bool time_derivative) {
  const double b = std::pow(s, alpha);
  const double omega = sphere_surface(n);
  constexpr int kSamples = 4097;
  std::vector<double> vals(kSamples);
  const double dy = b / (kSamples - 1);
  for (int j = 0; j < kSamples; ++j) {
    const double y = j * dy;
    const double g = time_derivative ? leibniz_gs(fn, y, s) : leibniz_g(fn, y, s);
    vals[j] = g * omega * (n > 1 ? std::pow(y, n - 1) : 1.0);
  }
  return simpson_uniform(vals, dy);
}

} // namespace

double leibniz_check(double alpha, LeibnizTestFunction fn,
                     std::span<const double> s_samples, int n) {
  double worst = 0.0;
  for (double s : s_samples) {
    if (!(s > 0.0)) throw DomainError("leibniz_check: needs s > 0");
    // LHS d/ds of the ball integral: fourth-order five-point stencil.
    const double delta = 1e-3 * std::max(1.0, s);
    auto I = [&](double ss) { return ball_integral(fn, alpha, ss, n, false); };
    const double lhs = (I(s - 2 * delta) - 8.0 * I(s - delta) +
                        8.0 * I(s + delta) - I(s + 2 * delta)) /
                       (12.0 * delta);
    const double b = std::pow(s, alpha);
    const double surface = sphere_surface(n) * (n > 1 ? std::pow(b, n - 1) : 1.0) *
                           leibniz_g(fn, b, s) * b;
    const double rhs = ball_integral(fn, alpha, s, n, true) + alpha / s * surface;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

} // namespace blowlab
