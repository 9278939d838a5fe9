#include "blowlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowlab/errors.hpp"
#include "blowlab/interp.hpp"
#include "blowlab/logspace.hpp"
#include "blowlab/version.hpp"

namespace blowlab {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

std::vector<SeriesPoint> tail(std::span<const SeriesPoint> series, size_t count) {
  const size_t start = series.size() > count ? series.size() - count : 0;
  return {series.begin() + start, series.end()};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

} // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Info: return "info";
  }
  return "info";
}

bool DiagnosticsReport::any_fail() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.verdict == Verdict::Fail; });
}

double theil_sen_slope(std::span<const SeriesPoint> series) {
  std::vector<double> slopes;
  for (size_t i = 0; i < series.size(); ++i) {
    for (size_t j = i + 1; j < series.size(); ++j) {
      const double dx = series[j].s - series[i].s;
      if (dx != 0.0) slopes.push_back((series[j].value - series[i].value) / dx);
    }
  }
  return median(std::move(slopes));
}

TrendResult trend_nonincreasing(std::span<const SeriesPoint> series) {
  TrendResult out;
  if (series.size() < 3) {
    out.nonincreasing = true;
    return out;
  }
  out.slope = theil_sen_slope(series);
  const double span = series.back().s - series.front().s;
  std::vector<double> mags;
  mags.reserve(series.size());
  for (const auto& p : series) mags.push_back(std::abs(p.value));
  const double floor = std::max(median(std::move(mags)),
                                64.0 * std::numeric_limits<double>::epsilon());
  out.nonincreasing = out.slope < 0.0 || std::abs(out.slope) * span <= 0.05 * floor;
  return out;
}

ProfileLimitResult profile_limit_check(std::span<const SelfSimilarFrame> frames,
                                     double c_compact) {
  ProfileLimitResult out;
  for (const auto& f : frames) {
    if (f.extent() < c_compact) continue;
    double sup = 0.0;
    for (size_t j = 0; j < f.y.size() && f.y[j] <= c_compact; ++j) {
      sup = std::max(sup, std::abs(f.v[j] - 1.0));
    }
    out.deviation.push_back({f.s, sup});
  }
  CheckResult& c = out.check;
  c.name = "profile_limit";
  c.claim = "sup_{|y|<=" + fmt(c_compact) +
            "} |v(y,s)-1| <= 0.1 at the last resolved s, nonincreasing trend "
            "over the last 10 frames";
  c.threshold = 0.1;
  if (out.deviation.size() < 2 ||
      out.deviation.back().s - out.deviation.front().s < 10.0) {
    c.verdict = Verdict::Info;
    c.notes = "under-resolved: s-range below 10";
    c.statistic = out.deviation.empty() ? 0.0 : out.deviation.back().value;
    return out;
  }
  const auto window = tail(out.deviation, 10);
  double window_max = 0.0;
  for (const auto& p : window) window_max = std::max(window_max, p.value);
  c.statistic = out.deviation.back().value;
  const TrendResult trend = trend_nonincreasing(window);
  c.verdict = (c.statistic <= c.threshold && trend.nonincreasing) ? Verdict::Pass
                                                                  : Verdict::Fail;
  std::ostringstream notes;
  notes << "window_max=" << window_max << " theil_sen_slope=" << trend.slope
        << (trend.nonincreasing ? " (nonincreasing)" : " (increasing)");
  c.notes = notes.str();
  return out;
}

HAlphaResult h_alpha_check(std::span<const Snapshot> snapshots,
                           const RadialGrid& grid, const Nonlinearity& nl,
                           const BlowupEstimate& est, double alpha,
                           BoundaryMode mode) {
  HAlphaResult out;
  const int j_hi = mode == BoundaryMode::USpace ? grid.J - 1 : grid.J;
  std::vector<double> r(j_hi + 1);
  for (int j = 0; j <= j_hi; ++j) r[j] = grid.r(j);

  size_t skipped = 0;
  for (size_t k = 0; k < snapshots.size(); ++k) {
    const double s = est.s[k];
    if (!(s > 0.0)) continue;
    const double radius = std::pow(s, alpha) * std::exp(-0.5 * s);
    if (radius > r[j_hi]) {
      ++skipped;
      continue;
    }
    std::vector<double> phi(snapshots[k].phi.begin(),
                            snapshots[k].phi.begin() + j_hi + 1);
    MonotoneCubic interp = radial_interpolant(r, phi);
    const double h_alpha = nl.F_inverse_log(-interp(radius));
    const double ode_rate = nl.F_inverse_log(est.log_gap[k]);
    out.ratio.push_back({s, h_alpha / ode_rate});
  }

  CheckResult& c = out.check;
  c.name = "h_alpha_lower_bound";
  c.claim = "u on the curve |x| = s^alpha sqrt(T-t) stays >= F^{-1}(T-t)/2 "
            "over the last half of the s-window";
  c.threshold = 0.5;
  if (out.ratio.size() < 4) {
    c.verdict = Verdict::Info;
    c.notes = "insufficient resolved snapshots";
    return out;
  }
  const size_t half = out.ratio.size() / 2;
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = half; k < out.ratio.size(); ++k) {
    worst = std::min(worst, out.ratio[k].value);
  }
  c.statistic = worst;
  c.verdict = worst >= c.threshold ? Verdict::Pass : Verdict::Fail;
  if (skipped > 0) c.notes = fmt(double(skipped)) + " snapshots outside the grid skipped";
  return out;
}

DerivativeEstimateResult derivative_estimate_check(
    std::span<const Snapshot> snapshots, const RadialGrid& grid,
    const Nonlinearity& nl, const BlowupEstimate& est, BoundaryMode mode,
    double boundary_layer_fraction, const CoefficientTable* coeff) {
  DerivativeEstimateResult out;
  const double h = grid.h();
  const double sqrtT = std::sqrt(std::max(est.T_est, 0.0));
  const double r0 = 0.5 * std::min(grid.R, sqrtT > 0.0 ? sqrtT : grid.R);
  const int layer_cells =
      std::max(2, static_cast<int>(std::ceil(boundary_layer_fraction * grid.J)));
  int j_max = std::min<int>(static_cast<int>(r0 / h), grid.J - 1 - layer_cells);
  j_max = std::max(j_max, 2);

  std::optional<CoefficientTable> local;
  if (coeff == nullptr) {
    double phi_top = 0.0;
    for (const auto& s : snapshots) phi_top = std::max(phi_top, s.phi_center);
    local.emplace(nl, phi_top + 5.0);
    coeff = &*local;
  }

  for (size_t k = 0; k < snapshots.size(); ++k) {
    const double s = est.s[k];
    if (!(s > 0.0)) continue;
    const auto& phi = snapshots[k].phi;
    double sup1 = 0.0, sup2 = 0.0;
    for (int j = 1; j <= j_max; ++j) {
      const double grad = (phi[j + 1] - phi[j - 1]) / (2.0 * h);
      const double second = (phi[j + 1] - 2.0 * phi[j] + phi[j - 1]) / (h * h);
      const double cg = (*coeff)(phi[j]); // f'F - 1
      sup1 = std::max(sup1, std::abs(grad));
      // grad^2 u / (fF) = (f'F - 1) Phi_r^2 + Phi_rr
      sup2 = std::max(sup2, std::abs(cg * grad * grad + second));
    }
    out.first_order.push_back({s, std::exp(-0.5 * s) * sup1});
    out.second_order.push_back({s, std::exp(-s) * sup2});
  }

  CheckResult& c = out.check;
  c.name = "derivative_estimates";
  c.claim = "sqrt(T-t) |grad u|/(fF) and (T-t) |grad^2 u|/(fF) stay bounded "
            "on the interior subball";
  c.threshold = 2.0;
  if (out.first_order.size() < 10) {
    c.verdict = Verdict::Info;
    c.notes = "insufficient snapshots";
    return out;
  }
  auto bounded = [&](std::span<const SeriesPoint> series) {
    // Bounded means: parked at a plateau (max within 2x of the window
    // median) or outright decaying. Only growth fails.
    const auto window = tail(series, 10);
    double mx = 0.0;
    std::vector<double> vals;
    for (const auto& p : window) {
      mx = std::max(mx, p.value);
      vals.push_back(p.value);
    }
    const double med = median(std::move(vals));
    const double floor = 1e-12;
    return mx <= 2.0 * med + floor || trend_nonincreasing(window).nonincreasing;
  };
  const bool ok1 = bounded(out.first_order);
  const bool ok2 = bounded(out.second_order);
  c.statistic = std::max(out.first_order.back().value, out.second_order.back().value);
  c.verdict = (ok1 && ok2) ? Verdict::Pass : Verdict::Fail;
  c.notes = "bound constants are measured, not asserted against any sharp value";
  if (mode == BoundaryMode::USpace) {
    c.notes += "; boundary layer excluded: outer " +
               fmt(boundary_layer_fraction * 100.0) + "% of the radius";
  }
  return out;
}

double quasiscaling_residual(const Snapshot& early, const Snapshot& mid,
                             const Snapshot& late, const RadialGrid& grid,
                             const Nonlinearity& nl, double lambda,
                             BoundaryMode bmode,
                             double exclude_boundary_fraction) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw DomainError("quasiscaling: lambda must lie in (0, 1]");
  }
  if (!(early.t < mid.t && mid.t < late.t)) {
    throw DomainError("quasiscaling: snapshots must be strictly t-ordered");
  }
  const int j_hi = bmode == BoundaryMode::USpace ? grid.J - 1 : grid.J;

  // With theta_i = t_i / lambda^2 the scaled field at (x, theta_i) is
  // Phi_i(lambda x) + 2 log lambda: the snapshots enter at their exact
  // times. For lambda = 1/k the x-grid x_i = k h i maps onto source nodes
  // lambda x_i = r_i, so the whole check is node-exact: no interpolation,
  // and the residual is pure scheme truncation. (Re-differencing a
  // shape-preserving interpolant would put an O(1) floor under the scaled
  // Laplacian, so irrational scalings are not offered.)
  const double inv = 1.0 / lambda;
  const int stride = static_cast<int>(std::lround(inv));
  if (std::abs(inv - stride) > 1e-9) {
    throw DomainError("quasiscaling: lambda must be a reciprocal integer (1, 1/2, ...)");
  }
  const double two_log_lambda = 2.0 * std::log(lambda);
  const double h = grid.h();
  const double H = stride * h; // spacing of the x-grid
  // Source points lambda * x must stay clear of the excluded boundary layer.
  const double r_cap = (1.0 - exclude_boundary_fraction) * grid.r(j_hi);
  const int i_end = static_cast<int>(std::floor(r_cap / h)) - 1;
  if (i_end < 2) throw DomainError("quasiscaling: scaled grid too small");

  std::vector<double> ul(i_end + 2);
  for (int i = 0; i <= i_end + 1; ++i) ul[i] = mid.phi[i] + two_log_lambda;

  double worst = 0.0;
  for (int i = 0; i <= i_end; ++i) {
    double lap, grad;
    if (i == 0) {
      lap = 2.0 * grid.n * (ul[1] - ul[0]) / (H * H);
      grad = 0.0;
    } else {
      const double x = H * i;
      lap = (ul[i + 1] - 2.0 * ul[i] + ul[i - 1]) / (H * H) +
            (grid.n - 1) / x * (ul[i + 1] - ul[i - 1]) / (2.0 * H);
      grad = (ul[i + 1] - ul[i - 1]) / (2.0 * H);
    }
    const double u_here = nl.F_inverse_log(-mid.phi[i]);
    const double cg = -nl.one_minus_fprime_F(u_here);
    const double dudt =
        lambda * lambda * (late.phi[i] - early.phi[i]) / (late.t - early.t);
    const double reaction = std::exp(ul[i]);
    const double res = dudt - (lap + reaction + grad * grad * cg);
    worst = std::max(worst, std::abs(res) / std::max(1.0, reaction));
  }
  return worst;
}

LocalizationResult localization_check(std::span<const Snapshot> snapshots,
                                      const RadialGrid& grid,
                                      const Nonlinearity& nl,
                                      BoundaryMode mode) {
  LocalizationResult out;
  const int j_hi = mode == BoundaryMode::USpace ? grid.J - 1 : grid.J;
  std::vector<double> r(j_hi + 1);
  for (int j = 0; j <= j_hi; ++j) r[j] = grid.r(j);

  const double probes[3] = {grid.R / 4.0, grid.R / 2.0, 3.0 * grid.R / 4.0};
  bool all_ok = true;
  for (double r0 : probes) {
    std::vector<double> u_series;
    for (const auto& snap : snapshots) {
      std::vector<double> phi(snap.phi.begin(), snap.phi.begin() + j_hi + 1);
      MonotoneCubic interp = radial_interpolant(r, phi);
      u_series.push_back(nl.F_inverse_log(-interp(r0)));
    }
    const size_t half = u_series.size() / 2;
    double mid_max = 0.0, last_max = 0.0;
    for (size_t k = 0; k < half; ++k) mid_max = std::max(mid_max, u_series[k]);
    for (size_t k = u_series.size() >= 10 ? u_series.size() - 10 : half;
         k < u_series.size(); ++k) {
      last_max = std::max(last_max, u_series[k]);
    }
    CheckResult probe;
    probe.name = "localization_probe_r=" + fmt(r0);
    probe.claim = "u(r0, t) stays bounded while u(0, t) diverges";
    probe.statistic = last_max;
    probe.threshold = 2.0 * mid_max;
    probe.verdict = last_max <= 2.0 * mid_max ? Verdict::Pass : Verdict::Fail;
    all_ok = all_ok && probe.verdict == Verdict::Pass;
    out.probes.push_back(probe);
  }
  CheckResult& c = out.check;
  c.name = "blowup_localized_at_origin";
  c.claim = "fixed-radius probes remain bounded (last-window max <= 2x "
            "mid-run max) while the center value diverges";
  c.statistic = all_ok ? 1.0 : 0.0;
  c.threshold = 1.0;
  c.verdict = all_ok ? Verdict::Pass : Verdict::Fail;
  return out;
}

namespace {

// Analytic property sweep of the nonlinearity at the run's (p, q).
void nonlinearity_suite(const Nonlinearity& nl, std::vector<CheckResult>& checks) {
  { // F / F^{-1} round trip
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double u = 0.5 + (50.0 - 0.5) * i / 199.0;
      const double back = nl.F_inverse_log(nl.log_F(u).log_magnitude);
      worst = std::max(worst, std::abs(back - u) / std::max(1.0, u));
    }
    CheckResult c;
    c.name = "lifetime_integral_round_trip";
    c.claim = "|F^{-1}(F(u)) - u| <= 1e-10 max(1, u) on u in [0.5, 50]";
    c.statistic = worst;
    c.threshold = 1e-10;
    c.verdict = worst <= c.threshold ? Verdict::Pass : Verdict::Fail;
    checks.push_back(c);
  }
  if (nl.family() == Family::SuperExponential) {
    const double l = nl.threshold_l();
    double worst = 0.0, worst_scaled = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double u = std::max(l, 1e-6) +
                       (50.0 - std::max(l, 1e-6)) * i / 199.0;
      const double omf = nl.one_minus_fprime_F(u);
      worst = std::max(worst, -omf); // f'F - 1 must stay <= ~0
      worst_scaled = std::max(worst_scaled,
                              omf * (nl.p() * std::pow(u, nl.p()) + nl.q()));
    }
    CheckResult c1;
    c1.name = "fprimeF_upper_bound";
    c1.claim = "f'(u) F(u) <= 1 + 1e-9 for u >= l(p, q)";
    c1.statistic = worst;
    c1.threshold = 1e-9;
    c1.verdict = worst <= c1.threshold ? Verdict::Pass : Verdict::Fail;
    checks.push_back(c1);

    CheckResult c2;
    c2.name = "fprimeF_deficit_rate";
    c2.claim = "(1 - f'F)(p u^p + q) bounded (<= 10) on [l, 50]";
    c2.statistic = worst_scaled;
    c2.threshold = 10.0;
    c2.verdict = worst_scaled <= c2.threshold ? Verdict::Pass : Verdict::Fail;
    checks.push_back(c2);
  }
  {
    const double S = 184.0;
    const double u = nl.F_inverse_log(-S);
    const double ratio = u / std::pow(S, 1.0 / nl.p());
    CheckResult c;
    c.name = "inverse_asymptote";
    c.claim = "F^{-1}(e^{-S}) / S^{1/p} within 5% of 1 at S = 184";
    c.statistic = std::abs(ratio - 1.0);
    c.threshold = 0.05;
    c.verdict = c.statistic <= c.threshold ? Verdict::Pass : Verdict::Fail;
    checks.push_back(c);
  }
}

} // namespace

DiagnosticsReport assemble_report(const RunArtifacts& art) {
  if (art.snapshots.empty()) throw DomainError("report: missing snapshots");
  if (art.frames.empty()) throw DomainError("report: missing frames");
  if (art.energy_records.empty()) throw DomainError("report: missing energy ledger");
  if (art.estimate.log_gap.size() != art.snapshots.size()) {
    throw DomainError("report: estimate does not match the snapshot list");
  }

  DiagnosticsReport rep;
  rep.run_id = art.run_id;
  rep.config_hash = art.config_hash;
  rep.code_name = kCodeName;
  rep.code_version = kCodeVersion;

  const BoundaryMode mode = boundary_mode_for(art.nl);

  rep.checks.push_back(profile_limit_check(art.frames, art.c_compact).check);

  { // type-I witness: band of F(u(0,t)) / (T - t) = 1 / v(0, s)
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (size_t k = 0; k < art.snapshots.size(); ++k) {
      if (!(art.estimate.s[k] > 0.0)) continue;
      const double ratio =
          std::exp(-art.snapshots[k].phi_center - art.estimate.log_gap[k]);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CheckResult c;
    c.name = "type_one_witness";
    c.claim = "F(u(0,t)) / (T-t) stays inside a fixed band [c, 1/c]";
    c.statistic = hi;
    c.threshold = 100.0; // generous cap; the measured band is the payload
    c.verdict = (hi <= c.threshold && lo > 0.0) ? Verdict::Pass : Verdict::Fail;
    std::ostringstream notes;
    notes << "band=[" << lo << ", " << hi << "] "
          << (art.supersolution_verified && art.nl.q() == 0.0
                  ? "(certified: supersolution data, q = 0)"
                  : "(measured, not certified)");
    c.notes = notes.str();
    rep.checks.push_back(c);
  }

  { // comparison principle: the center obeys the space-free flow started
    // from the initial sup, so T_k = t_k + F(u(0,t_k)) never drops below
    // T_0 = F(u_max(0)).
    CompensatedSum elapsed;
    double worst = 0.0;
    const double F0 = std::exp(-art.snapshots.front().phi_center);
    for (size_t k = 1; k < art.snapshots.size(); ++k) {
      elapsed.add(art.snapshots[k].dt_since_prev);
      const double Tk_minus_T0 =
          elapsed.value() + std::exp(-art.snapshots[k].phi_center) - F0;
      worst = std::min(worst, Tk_minus_T0);
    }
    CheckResult c;
    c.name = "ode_comparison_from_sup";
    c.claim = "t + F(u(0,t)) stays >= F(u_max(0)): the center value never "
              "exceeds the space-free solution started from the initial sup";
    c.statistic = worst;
    c.threshold = -1e-9 * F0;
    c.verdict = worst >= c.threshold ? Verdict::Pass : Verdict::Fail;
    rep.checks.push_back(c);
  }

  { // ODE lower bound at the center: v(0, s) >= 1 - eps
    double worst = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < art.snapshots.size(); ++k) {
      if (!(art.estimate.s[k] > 0.0)) continue;
      worst = std::min(worst, std::exp(art.snapshots[k].phi_center +
                                       art.estimate.log_gap[k]));
    }
    CheckResult c;
    c.name = "ode_rate_lower_bound";
    c.claim = "center value obeys u(0,t) >= F^{-1}(T-t)(1-eps): v(0,s) >= 0.95";
    c.statistic = worst;
    c.threshold = 0.95;
    c.verdict = worst >= c.threshold ? Verdict::Pass : Verdict::Fail;
    rep.checks.push_back(c);
  }

  double phi_top = 0.0;
  for (const auto& s : art.snapshots) phi_top = std::max(phi_top, s.phi_center);
  const CoefficientTable coeff(art.nl, phi_top + 5.0);

  rep.checks.push_back(h_alpha_check(art.snapshots, art.grid, art.nl,
                                     art.estimate, art.alpha, mode)
                           .check);
  rep.checks.push_back(derivative_estimate_check(art.snapshots, art.grid, art.nl,
                                                 art.estimate, mode,
                                                 art.boundary_layer_fraction, &coeff)
                           .check);

  { // quasi-scaling residual at lambda = 1 and 1/2, early triple
    const size_t k0 = std::min<size_t>(2, art.snapshots.size() - 3);
    const double exclude =
        mode == BoundaryMode::USpace ? art.boundary_layer_fraction : 0.0;
    for (double lambda : {1.0, 0.5}) {
      CheckResult c;
      c.name = lambda == 1.0 ? "quasiscaling_identity" : "quasiscaling_half";
      c.claim = "scaled field u_lambda solves the exponential-form equation "
                "up to scheme truncation";
      c.statistic = quasiscaling_residual(art.snapshots[k0], art.snapshots[k0 + 1],
                                          art.snapshots[k0 + 2], art.grid, art.nl,
                                          lambda, mode, exclude);
      c.threshold = 0.5; // consistency cap; the sharp claim is the refinement order
      c.verdict = c.statistic <= c.threshold ? Verdict::Pass : Verdict::Fail;
      if (exclude > 0.0) {
        c.notes = "boundary layer excluded: outer " + fmt(exclude * 100.0) +
                  "% of the radius";
      }
      rep.checks.push_back(c);
    }
  }

  {
    LocalizationResult loc = localization_check(art.snapshots, art.grid, art.nl, mode);
    rep.checks.push_back(loc.check);
    for (auto& p : loc.probes) rep.checks.push_back(p);
  }

  { // energy dissipation ledger
    if (art.energy_records.size() >= 3) {
      // Slack: 3x the local equation residual per interval, the documented
      // discretization allowance (records[k] sits on frames[k+1]).
      std::vector<double> frame_residual(art.frames.size(), 0.0);
      for (size_t i = 1; i + 1 < art.frames.size(); ++i) {
        frame_residual[i] = residual_veq(art.frames[i - 1], art.frames[i],
                                         art.frames[i + 1], coeff);
      }
      std::vector<double> slack(art.energy_records.size() - 1, 0.0);
      for (size_t k = 0; k + 1 < art.energy_records.size(); ++k) {
        slack[k] =
            3.0 * std::max(frame_residual[k + 1], frame_residual[k + 2]);
      }
      const auto ledger = energy_inequality_check(art.energy_records, slack);
      size_t ok = 0;
      for (const auto& e : ledger) ok += e.pass ? 1 : 0;
      const double pass_fraction = double(ok) / double(ledger.size());
      CheckResult c;
      c.name = "energy_inequality";
      c.claim = "1/2 int v_s^2/v^2 rho <= -dE/ds + H on >= 95% of s-intervals "
                "within stated slack";
      c.statistic = pass_fraction;
      c.threshold = 0.95;
      c.verdict = pass_fraction >= c.threshold ? Verdict::Pass : Verdict::Fail;
      c.notes = "slack = 3x local equation residual per interval";
      rep.checks.push_back(c);
    }
  }

  { // summability of the perturbation budget H
    std::vector<SeriesPoint> logH;
    for (const auto& r : art.energy_records) {
      if (r.s > 0.0 && std::abs(r.H) > 0.0) {
        logH.push_back({std::log(r.s), std::log(std::abs(r.H))});
      }
    }
    CheckResult c;
    c.name = "H_summability";
    c.claim = "perturbation budget decays with fitted exponent <= -1.5, "
              "so int H ds converges";
    c.threshold = -1.5;
    if (logH.size() >= 6) {
      const auto half = tail(logH, logH.size() / 2);
      c.statistic = theil_sen_slope(half);
      c.verdict = c.statistic <= c.threshold ? Verdict::Pass : Verdict::Fail;
    } else {
      c.verdict = Verdict::Info;
      c.notes = "too few records";
    }
    rep.checks.push_back(c);
  }

  { // stationary identity residual trend
    std::vector<SeriesPoint> series;
    for (const auto& f : art.frames) {
      series.push_back({f.s, stationary_identity(f).residual});
    }
    CheckResult c;
    c.name = "stationary_identity_trend";
    c.claim = "1/4 int (v_y/v)^2 y^2 rho + (2-n)/2 int (v_y/v)^2 rho tends to 0";
    if (series.size() >= 10) {
      const auto window = tail(series, 10);
      const TrendResult tr = trend_nonincreasing(window);
      c.statistic = window.back().value;
      c.threshold = window.front().value;
      c.verdict = tr.nonincreasing ? Verdict::Pass : Verdict::Fail;
      c.notes = "theil_sen_slope=" + fmt(tr.slope);
    } else {
      c.verdict = Verdict::Info;
    }
    rep.checks.push_back(c);
  }

  { // Lipschitz bound on log v and the v_s growth bound (reported constants)
    double c_run = 0.0;
    for (const auto& f : art.frames) {
      for (size_t j = 1; j < f.y.size(); ++j) {
        const double dlogv = std::abs(std::log(f.v[j]) - std::log(f.v[j - 1]));
        c_run = std::max(c_run, dlogv / f.dy());
      }
    }
    CheckResult c;
    c.name = "log_v_lipschitz";
    c.claim = "|d log v / dy| <= C uniformly over frames (C reported)";
    c.statistic = c_run;
    c.threshold = 0.0;
    c.verdict = Verdict::Info;
    rep.checks.push_back(c);
  }
  {
    double c_prime = 0.0;
    for (size_t k = 1; k + 1 < art.frames.size(); ++k) {
      const auto& lo = art.frames[k - 1];
      const auto& hi = art.frames[k + 1];
      const auto& mid = art.frames[k];
      MonotoneCubic v_lo = radial_interpolant(lo.y, lo.v);
      MonotoneCubic v_hi = radial_interpolant(hi.y, hi.v);
      const double ext = std::min(lo.extent(), hi.extent());
      for (size_t j = 0; j < mid.y.size(); ++j) {
        const double y = mid.y[j];
        if (y > ext) break;
        const double vs = (v_hi(y) - v_lo(y)) / (hi.s - lo.s);
        c_prime = std::max(c_prime, std::abs(vs) / mid.v[j] / (1.0 + y));
      }
    }
    CheckResult c;
    c.name = "vs_growth_bound";
    c.claim = "|v_s|/v <= C'(1 + |y|) over frames (C' reported)";
    c.statistic = c_prime;
    c.threshold = 0.0;
    c.verdict = Verdict::Info;
    rep.checks.push_back(c);
  }

  { // positivity dichotomy surrogate
    double min_v = std::numeric_limits<double>::infinity();
    const size_t start = art.frames.size() >= 10 ? art.frames.size() - 10 : 0;
    for (size_t k = start; k < art.frames.size(); ++k) {
      const auto& f = art.frames[k];
      for (size_t j = 0; j < f.y.size() && f.y[j] <= 1.0; ++j) {
        min_v = std::min(min_v, f.v[j]);
      }
    }
    CheckResult c;
    c.name = "positivity_dichotomy";
    c.claim = "min_{|y|<=1} v stays strictly positive over the last 10 frames "
              "(the vanishing branch is excluded by the ODE bound)";
    c.statistic = min_v;
    c.threshold = 1e-3;
    c.verdict = min_v >= c.threshold ? Verdict::Pass : Verdict::Fail;
    rep.checks.push_back(c);
  }

  { // Leibniz rule on the growing ball, analytic family
    const double s_samples[3] = {4.0, 9.0, 16.0};
    const double tols[3] = {1e-10, 1e-8, 1e-6};
    const LeibnizTestFunction fns[3] = {LeibnizTestFunction::One,
                                        LeibnizTestFunction::Gaussian,
                                        LeibnizTestFunction::PolyGaussian};
    const char* names[3] = {"leibniz_constant", "leibniz_gaussian",
                            "leibniz_poly_gaussian"};
    for (int i = 0; i < 3; ++i) {
      CheckResult c;
      c.name = names[i];
      c.claim = "d/ds of the growing-ball integral equals the bulk + surface "
                "terms on an analytic test function";
      c.statistic = leibniz_check(art.alpha, fns[i], s_samples, art.grid.n);
      c.threshold = tols[i];
      c.verdict = c.statistic <= c.threshold ? Verdict::Pass : Verdict::Fail;
      rep.checks.push_back(c);
    }
  }

  nonlinearity_suite(art.nl, rep.checks);

  if (art.estimate.monotone_warning) {
    CheckResult c;
    c.name = "blowup_time_sequence";
    c.claim = "T_k = t_k + F(u(0,t_k)) increases monotonically";
    c.verdict = Verdict::Info;
    c.notes = "non-monotone beyond uncertainty; estimate flagged";
    rep.checks.push_back(c);
  }
  return rep;
}

} // namespace blowlab
