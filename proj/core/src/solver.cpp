#include "blowlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blowlab/errors.hpp"
#include "blowlab/logspace.hpp"

namespace blowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// e^{Phi} must stay representable; the step controller is expected to keep
// Phi comfortably below this.
constexpr double kPhiCeiling = 705.0;

// Target drift of Phi per unit Phi in the reaction-limited phase is
// ~0.21 sigma^2 for the midpoint rule on Phi_t = e^Phi, so the reaction
// step fraction sigma follows from the controller tolerance.
double reaction_sigma(double tol) {
  return std::min(0.2, std::sqrt(tol / 0.21));
}

double max_interior_phi(std::span<const double> phi, BoundaryMode mode) {
  const size_t last = mode == BoundaryMode::NeumannZero ? phi.size() : phi.size() - 1;
  double m = -kInf;
  for (size_t j = 0; j < last; ++j) m = std::max(m, phi[j]);
  return m;
}

bool radially_nonincreasing(std::span<const double> phi, double tol_abs) {
  for (size_t j = 0; j + 1 < phi.size(); ++j) {
    if (phi[j + 1] > phi[j] + tol_abs) return false;
  }
  return true;
}

} // namespace

BoundaryMode boundary_mode_for(const Nonlinearity& nl) {
  if (nl.family() == Family::SuperExponential && nl.q() >= 1.0) {
    return BoundaryMode::USpace;
  }
  return BoundaryMode::PhiSpace;
}

CoefficientTable::CoefficientTable(const Nonlinearity& nl, double phi_hi)
    : nl_(nl) {
  if (nl.family() == Family::PureExponentialReference) {
    constant_ = true;
    constant_value_ = 0.0;
    return;
  }
  if (nl.family() == Family::PowerReference) {
    constant_ = true;
    constant_value_ = 1.0 / (nl.p() - 1.0);
    max_abs_ = constant_value_;
    return;
  }
  constant_ = false;

  // Walk u with steps chosen from dPhi/du = 1/(fF) so the Phi axis is
  // sampled densely where the coefficient bends and geometrically in the
  // flat tail.
  std::vector<double> phis, coeffs;
  double u = nl.q() >= 1.0 ? 1e-14 : 0.0;
  double phi = -nl.log_F(u).log_magnitude;
  const double phi_start = phi;
  while (phi < phi_hi + 20.0) {
    phis.push_back(phi);
    coeffs.push_back(-nl.one_minus_fprime_F(u));
    const double dphi_target =
        std::min({0.25, 0.02 * (std::abs(phi) + 1.0),
                  0.002 + 0.05 * (phi - phi_start)});
    const double fF = std::exp(nl.log_f(std::max(u, 1e-14)) + nl.log_F(u).log_magnitude);
    double du = dphi_target * fF;
    if (!(du > 0.0) || !std::isfinite(du)) du = std::max(1e-14, 1e-3 * u);
    du = std::max(du, u * 1e-6 + 1e-16);
    u += du;
    const double next_phi = -nl.log_F(u).log_magnitude;
    if (!(next_phi > phi)) {
      u *= 1.0 + 1e-9;
      phi = -nl.log_F(u).log_magnitude;
      continue;
    }
    phi = next_phi;
  }
  phis.push_back(phi);
  coeffs.push_back(-nl.one_minus_fprime_F(u));
  phi_lo_ = phis.front();
  phi_hi_ = phis.back();
  for (double c : coeffs) max_abs_ = std::max(max_abs_, std::abs(c));
  table_ = MonotoneCubic(phis, coeffs);
}

double CoefficientTable::operator()(double phi) const {
  if (constant_) return constant_value_;
  if (phi < phi_lo_ || phi > phi_hi_) {
    // Honest slow path outside the tabulated window (deep boundary layer
    // values for q >= 1); never clamp.
    const double u = nl_.F_inverse_log(-phi);
    return -nl_.one_minus_fprime_F(u);
  }
  return table_(phi);
}

namespace {

template <typename Coeff>
std::vector<double> rhs_phi_impl(const Coeff& coeff, const RadialGrid& grid,
                                 std::span<const double> phi, BoundaryMode mode,
                                 const RhsOptions& opts) {
  const int J = grid.J;
  if (static_cast<int>(phi.size()) != J + 1) {
    throw std::invalid_argument("rhs_phi: field size must be J+1");
  }
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> out(J + 1, 0.0);

  for (int j = 0; j <= J; ++j) {
    const bool boundary_sentinel =
        j == J && mode == BoundaryMode::USpace && phi[j] == -kInf;
    if (!std::isfinite(phi[j]) && !boundary_sentinel) {
      std::ostringstream os;
      os << "rhs_phi: non-finite field entry at node " << j
         << " (r = " << grid.r(j) << ")";
      throw NumericalError(os.str());
    }
  }

  auto reaction = [&](double p) {
    if (p > kPhiCeiling) {
      throw NumericalError("rhs_phi: e^Phi overflow; the step controller failed");
    }
    return std::exp(p);
  };

  // Last interior node treated with the generic centered stencil.
  const int centered_end = mode == BoundaryMode::USpace ? J - 2 : J - 1;

  { // center: symmetry rule, gradient vanishes
    const double lap = 2.0 * grid.n * (phi[1] - phi[0]) * inv_h2;
    out[0] = lap + (opts.reaction ? reaction(phi[0]) : 0.0);
  }
  for (int j = 1; j <= centered_end; ++j) {
    const double lap = (phi[j + 1] - 2.0 * phi[j] + phi[j - 1]) * inv_h2 +
                       (grid.n - 1) / grid.r(j) * (phi[j + 1] - phi[j - 1]) / (2.0 * h);
    double v = lap;
    if (opts.reaction) v += reaction(phi[j]);
    if (opts.gradient) {
      const double grad = (phi[j + 1] - phi[j - 1]) / (2.0 * h);
      v += grad * grad * coeff(phi[j]);
    }
    out[j] = v;
  }
  if (mode == BoundaryMode::USpace) {
    // phi[J] = -inf; go one-sided at J-1 (first order there, confined to
    // the boundary cell).
    const int j = J - 1;
    const double lap = (phi[j] - 2.0 * phi[j - 1] + phi[j - 2]) * inv_h2 +
                       (grid.n - 1) / grid.r(j) *
                           (3.0 * phi[j] - 4.0 * phi[j - 1] + phi[j - 2]) / (2.0 * h);
    double v = lap;
    if (opts.reaction) v += reaction(phi[j]);
    if (opts.gradient) {
      const double grad = (3.0 * phi[j] - 4.0 * phi[j - 1] + phi[j - 2]) / (2.0 * h);
      v += grad * grad * coeff(phi[j]);
    }
    out[j] = v;
  } else if (mode == BoundaryMode::NeumannZero) {
    const double lap = 2.0 * (phi[J - 1] - phi[J]) * inv_h2;
    out[J] = lap + (opts.reaction ? reaction(phi[J]) : 0.0);
  }
  // Dirichlet nodes (PhiSpace / USpace) keep rhs = 0.

  for (int j = 0; j <= J; ++j) {
    if (!std::isfinite(out[j])) {
      std::ostringstream os;
      os << "rhs_phi: non-finite value at node " << j << " (r = " << grid.r(j) << ")";
      throw NumericalError(os.str());
    }
  }
  return out;
}

} // namespace

std::vector<double> rhs_phi(const Nonlinearity& nl, const RadialGrid& grid,
                            std::span<const double> phi, BoundaryMode mode,
                            const RhsOptions& opts) {
  auto coeff = [&](double p) {
    if (nl.family() == Family::PureExponentialReference) return 0.0;
    const double u = nl.F_inverse_log(-p);
    return -nl.one_minus_fprime_F(u);
  };
  return rhs_phi_impl(coeff, grid, phi, mode, opts);
}

std::vector<double> rhs_phi_tabulated(const CoefficientTable& coeff,
                                      const RadialGrid& grid,
                                      std::span<const double> phi,
                                      BoundaryMode mode, const RhsOptions& opts) {
  return rhs_phi_impl(coeff, grid, phi, mode, opts);
}

StepStats step(const Nonlinearity& nl, const CoefficientTable& coeff,
               const RadialGrid& grid, Snapshot& snap,
               const StepController& ctrl, BoundaryMode mode,
               const RhsOptions& opts) {
  (void)nl;
  const int J = grid.J;
  const double h = grid.h();
  std::span<const double> phi(snap.phi);
  const double phimax = max_interior_phi(phi, mode);
  if (phimax > kPhiCeiling) {
    throw NumericalError("step: Phi exceeded the exp ceiling; controller failed");
  }

  // dt limiter: diffusion stability and reaction accuracy, plus the
  // gradient-term Jacobian scale which can dominate in the q >= 1
  // boundary layer.
  double est = opts.reaction ? std::exp(phimax) : 0.0;
  if (opts.gradient && coeff.max_abs() > 0.0) {
    double grad_max = 0.0;
    const int hi = mode == BoundaryMode::USpace ? J - 1 : J;
    for (int j = 1; j < hi; ++j) {
      const double grad = (snap.phi[j + 1] - snap.phi[j - 1]) / (2.0 * h);
      if (std::isfinite(grad)) grad_max = std::max(grad_max, std::abs(grad));
    }
    est += coeff.max_abs() * 2.0 * grad_max / h;
  }
  const double sigma = reaction_sigma(ctrl.tol);
  const double dt_diffusion = ctrl.safety * h * h / (2.0 * grid.n);
  double dt = dt_diffusion;
  if (est > 0.0) dt = std::min(dt, sigma / est);

  const std::vector<double> k1 = rhs_phi_tabulated(coeff, grid, phi, mode, opts);
  std::vector<double> phi_half(J + 1), phi_new(J + 1);

  StepStats stats;
  const double mono_tol = ctrl.monotonicity_tol * std::max(1.0, std::abs(snap.phi[0]));
  for (int attempt = 0;; ++attempt) {
    for (int j = 0; j <= J; ++j) phi_half[j] = snap.phi[j] + 0.5 * dt * k1[j];
    const std::vector<double> k2 = rhs_phi_tabulated(coeff, grid, phi_half, mode, opts);
    for (int j = 0; j <= J; ++j) phi_new[j] = snap.phi[j] + dt * k2[j];

    bool ok = true;
    for (int j = 0; j <= J; ++j) {
      if (std::isnan(phi_new[j]) || phi_new[j] == kInf) { ok = false; break; }
    }
    if (ok) ok = radially_nonincreasing(phi_new, mono_tol);
    if (ok) break;

    if (attempt >= ctrl.max_halvings) {
      throw NumericalError("step: monotonicity could not be restored within the halving cap");
    }
    dt *= 0.5;
    ++stats.halvings;
    const double dt_floor = 1e-3 * sigma * std::exp(-std::min(phimax, kPhiCeiling));
    if (dt < dt_floor && dt < dt_diffusion) {
      std::ostringstream os;
      os << "step: dt underflow (dt = " << dt << ", floor = " << dt_floor
         << ") at t = " << snap.t << ", step " << snap.step_index
         << ", Phi_max = " << phimax;
      throw NumericalError(os.str());
    }
  }

  snap.phi.swap(phi_new);
  snap.t += dt;
  snap.phi_center = snap.phi[0];
  snap.step_index += 1;
  stats.dt = dt;
  return stats;
}

InitialData make_initial_data(const Nonlinearity& nl, const RadialGrid& grid,
                              double amplitude, bool check_supersolution) {
  if (!(amplitude > 0.0)) throw ConfigError("initial data: amplitude must be positive");
  if (check_supersolution && !(nl.family() == Family::SuperExponential && nl.q() == 0.0) &&
      nl.family() != Family::PureExponentialReference) {
    throw ConfigError("initial data: the supersolution check needs q = 0 (f(0) > 0)");
  }

  const int J = grid.J;
  double A = amplitude;
  InitialData out;
  for (int attempt = 0; attempt <= 50; ++attempt) {
    std::vector<double> u0(J + 1);
    for (int j = 0; j <= J; ++j) {
      const double x = grid.r(j) / grid.R;
      u0[j] = std::max(0.0, A * (1.0 - x * x));
    }
    u0[J] = 0.0;

    bool ok = true;
    if (check_supersolution) {
      // Node-wise Delta u0 + f(u0) >= 0, compared in log space so the
      // amplitude search cannot overflow f linearly.
      const std::vector<double> lap = laplacian_radial(grid, u0);
      for (int j = 0; j < J; ++j) {
        if (lap[j] >= 0.0) continue;
        if (nl.log_f(u0[j]) < std::log(-lap[j]) - 1e-12) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      out.phi0.assign(J + 1, 0.0);
      for (int j = 0; j <= J; ++j) {
        out.phi0[j] = -nl.log_F(u0[j]).log_magnitude;
      }
      out.amplitude_used = A;
      out.supersolution_verified = check_supersolution;
      return out;
    }
    A *= 1.2;
  }
  throw ConfigError(
      "initial data: Delta u0 + f(u0) >= 0 could not be satisfied within 50 "
      "amplitude increases; for this profile the condition needs "
      "2 n A / R^2 <= min f(u0), so shrink A or grow R");
}

RunResult run_to_blowup(const RunSetup& setup) {
  const Nonlinearity& nl = setup.nl;
  const RadialGrid& grid = setup.grid;
  const BoundaryMode mode =
      setup.boundary_override.value_or(boundary_mode_for(nl));
  if (static_cast<int>(setup.phi0.size()) != grid.J + 1) {
    throw ConfigError("run: phi0 size does not match the grid");
  }
  if (!(setup.phi_stop <= 690.0)) {
    throw ConfigError("run: phi_stop must be <= 690 so e^{-Phi} stays normal");
  }

  CoefficientTable coeff(nl, setup.phi_stop);

  RunResult result;
  Snapshot state;
  state.phi = setup.phi0;
  state.phi_center = state.phi[0];
  state.t = 0.0;
  state.step_index = 0;

  CompensatedSum t_acc;        // absolute time
  CompensatedSum interval_acc; // time since the previous snapshot

  auto emit = [&](Snapshot snap) {
    snap.dt_since_prev = interval_acc.value();
    interval_acc = CompensatedSum{};
    snap.umax = nl.F_inverse_log(-snap.phi[0]);
    if (setup.on_snapshot) setup.on_snapshot(snap);
    result.snapshots.push_back(std::move(snap));
  };

  double phimax = max_interior_phi(state.phi, mode);
  const double phi_start = phimax;
  emit(state);
  double next_level = phi_start + setup.snapshot_delta_phi;

  while (phimax < setup.phi_stop) {
    if (result.accepted_steps >= setup.max_steps) {
      std::ostringstream os;
      os << "run: step budget (" << setup.max_steps << ") exhausted at Phi_max = "
         << phimax << ", t = " << state.t;
      throw NumericalError(os.str());
    }
    if (state.t >= setup.t_max) {
      std::ostringstream os;
      os << "run: global-existence-suspected: no blow-up by t_max = "
         << setup.t_max << " (Phi_max = " << phimax << ", steps = "
         << result.accepted_steps << ")";
      throw GlobalExistenceSuspected(os.str());
    }

    StepStats st = step(nl, coeff, grid, state, setup.controller, mode);
    result.accepted_steps += 1;
    result.retried_steps += st.halvings;
    t_acc.add(st.dt);
    interval_acc.add(st.dt);
    state.t = t_acc.value();
    phimax = max_interior_phi(state.phi, mode);

    if (phimax >= next_level || phimax >= setup.phi_stop) {
      emit(state);
      while (next_level <= phimax) next_level += setup.snapshot_delta_phi;
    }
  }

  if (result.snapshots.size() >= 5) {
    result.estimate = estimate_blowup_time(result.snapshots);
  }
  return result;
}

BlowupEstimate estimate_blowup_time(std::span<const Snapshot> snapshots) {
  const size_t K = snapshots.size();
  if (K < 5) throw DomainError("estimate_T: need at least 5 snapshots");
  for (size_t k = 1; k < K; ++k) {
    if (!(snapshots[k].umax > snapshots[k - 1].umax)) {
      throw DomainError("estimate_T: snapshots must have increasing umax");
    }
  }

  // Offsets B_k = T_k - T_K with T_k = t_k + F(u(0, t_k)); F_k = e^{-phi(0)}
  // exactly because the solver evolves Phi itself. Everything is assembled
  // from representable differences; T_est - t never appears linearly.
  std::vector<double> F(K), B(K);
  for (size_t k = 0; k < K; ++k) F[k] = std::exp(-snapshots[k].phi_center);
  double cum = 0.0; // t_K - t_k
  B[K - 1] = 0.0;
  for (size_t k = K - 1; k-- > 0;) {
    cum += snapshots[k + 1].dt_since_prev;
    B[k] = F[k] - F[K - 1] - cum;
  }

  auto aitken = [&](size_t i) -> std::pair<bool, double> {
    const double b0 = B[i], b1 = B[i + 1], b2 = B[i + 2];
    const double denom = b2 - 2.0 * b1 + b0;
    const double scale = std::abs(b0) + std::abs(b1) + std::abs(b2);
    if (std::abs(denom) < 1e-12 * scale || scale == 0.0) return {false, b2};
    return {true, b2 - (b2 - b1) * (b2 - b1) / denom};
  };

  BlowupEstimate est;
  std::vector<double> extrapolants;
  bool any_aitken = false;
  for (size_t i = K - 5; i + 2 <= K - 1; ++i) { // triples ending at K-3..K-1
    auto [ok, v] = aitken(i);
    extrapolants.push_back(v);
    any_aitken = any_aitken || ok;
  }
  double T_off = extrapolants.back();
  est.method = any_aitken ? "aitken" : "last_value";

  double spread = 0.0;
  for (double v : extrapolants) spread = std::max(spread, std::abs(v - T_off));
  est.uncertainty = spread + 4.0 * std::numeric_limits<double>::epsilon() *
                                 std::abs(snapshots[K - 1].t + F[K - 1]);

  // The extrapolated limit must leave every gap positive; otherwise anchor
  // at the last value.
  auto gaps_valid = [&](double off) {
    for (size_t k = 0; k < K; ++k) {
      if (1.0 + (off - B[k]) / F[k] <= 0.0) return false;
    }
    return true;
  };
  if (!gaps_valid(T_off)) {
    T_off = 0.0;
    est.method = "last_value";
  }

  est.log_gap.resize(K);
  est.s.resize(K);
  for (size_t k = 0; k < K; ++k) {
    est.log_gap[k] = -snapshots[k].phi_center + std::log1p((T_off - B[k]) / F[k]);
    est.s[k] = -est.log_gap[k];
  }
  est.T_est = snapshots[K - 1].t + F[K - 1] + T_off;
  est.log_gap_last = est.log_gap[K - 1];

  double tol = std::max(est.uncertainty, 1e-14 * F[0]);
  for (size_t k = 1; k < K; ++k) {
    if (B[k] < B[k - 1] - tol) {
      est.monotone_warning = true;
      break;
    }
  }
  return est;
}

} // namespace blowlab
