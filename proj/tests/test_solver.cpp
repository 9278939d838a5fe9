#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "blowlab/errors.hpp"
#include "blowlab/solver.hpp"

using namespace blowlab;

namespace {

std::vector<double> constant_field(const RadialGrid& g, double value) {
  return std::vector<double>(g.nodes(), value);
}

RunResult reduction_run(const Nonlinearity& nl, double y0, double span,
                        int J = 64) {
  RadialGrid grid(1, 1.0, J);
  const double phi_init = -nl.log_F(y0).log_magnitude;
  RunSetup setup;
  setup.nl = nl;
  setup.grid = grid;
  setup.phi0.assign(grid.nodes(), phi_init);
  setup.phi_stop = phi_init + span;
  setup.boundary_override = BoundaryMode::NeumannZero;
  return run_to_blowup(setup);
}

} // namespace

TEST_CASE("radial Laplacian stencil") {
  RadialGrid g1(1, 1.0, 64);
  { // constant -> 0 everywhere
    auto lap = laplacian_radial(g1, constant_field(g1, 3.7));
    for (double v : lap) CHECK(v == 0.0);
  }
  { // r^2 -> 2n, exact for quadratics including origin and outer node
    for (int n : {1, 2, 3}) {
      RadialGrid g(n, 1.0, 64);
      std::vector<double> f(g.nodes());
      for (int j = 0; j <= g.J; ++j) f[j] = g.r(j) * g.r(j);
      auto lap = laplacian_radial(g, f);
      for (int j = 0; j <= g.J; ++j) {
        CHECK(lap[j] == doctest::Approx(2.0 * n).epsilon(1e-11));
      }
    }
  }
  CHECK_THROWS(laplacian_radial(g1, std::vector<double>(3, 0.0)));
}

TEST_CASE("rhs in Phi space: exponential family has no perturbation term") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  RadialGrid grid(1, 1.0, 64);
  std::vector<double> phi(grid.nodes());
  for (int j = 0; j <= grid.J; ++j) {
    const double r = grid.r(j);
    phi[j] = 2.0 + std::cos(M_PI * r / 2.0); // sloped field
  }
  RhsOptions with, without;
  without.gradient = false;
  const auto a = rhs_phi(nle, grid, phi, BoundaryMode::PhiSpace, with);
  const auto b = rhs_phi(nle, grid, phi, BoundaryMode::PhiSpace, without);
  for (int j = 0; j <= grid.J; ++j) CHECK(a[j] == b[j]);
  // and rhs = Lap Phi + e^Phi exactly
  const auto lap = laplacian_radial(grid, phi);
  for (int j = 1; j < grid.J; ++j) {
    CHECK(a[j] == doctest::Approx(lap[j] + std::exp(phi[j])).epsilon(1e-13));
  }
}

TEST_CASE("rhs on a spatially constant state reduces to the ODE") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 1.0, 64);
  const double y = 1.3;
  const double phi_c = -nl.log_F(y).log_magnitude;
  const auto rhs = rhs_phi(nl, grid, constant_field(grid, phi_c),
                           BoundaryMode::NeumannZero);
  // Phi_t = e^Phi = 1/F(y)
  const double expect = std::exp(phi_c);
  for (int j = 0; j <= grid.J; ++j) {
    CHECK(rhs[j] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("manufactured profile: spatial residual converges at order >= 1.8") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  double prev = 0.0;
  std::vector<double> errs;
  for (int J : {128, 256, 512}) {
    RadialGrid grid(1, 1.0, J);
    const double A = 0.8, off = 0.5, k = M_PI / 2.0;
    std::vector<double> phi(grid.nodes());
    for (int j = 0; j <= J; ++j) phi[j] = off + A * std::cos(k * grid.r(j));
    const auto rhs = rhs_phi(nl, grid, phi, BoundaryMode::PhiSpace);
    double worst = 0.0;
    for (int j = 0; j < J; ++j) {
      const double r = grid.r(j);
      const double lap_exact = -A * k * k * std::cos(k * r); // n = 1
      const double grad_exact = j == 0 ? 0.0 : -A * k * std::sin(k * r);
      const double u = nl.F_inverse_log(-phi[j]);
      const double coeff = -nl.one_minus_fprime_F(u);
      const double exact =
          lap_exact + std::exp(phi[j]) + grad_exact * grad_exact * coeff;
      worst = std::max(worst, std::abs(rhs[j] - exact));
    }
    errs.push_back(worst);
    if (prev > 0.0) {
      const double order = std::log2(prev / worst);
      CHECK(order >= 1.8);
    }
    prev = worst;
  }
  CHECK(errs.back() < errs.front());
}

TEST_CASE("diffusion-only heat decay matches the discrete eigenvalue") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  RadialGrid grid(1, 1.0, 64);
  CoefficientTable coeff(nle, 20.0);
  Snapshot snap;
  snap.phi.resize(grid.nodes());
  const double k = M_PI / 2.0;
  for (int j = 0; j <= grid.J; ++j) snap.phi[j] = std::cos(k * grid.r(j));
  snap.phi_center = snap.phi[0];
  StepController ctrl;
  RhsOptions opts;
  opts.reaction = false;
  opts.gradient = false;
  double t = 0.0;
  for (int m = 0; m < 100; ++m) {
    t += step(nle, coeff, grid, snap, ctrl, BoundaryMode::PhiSpace, opts).dt;
  }
  const double h = grid.h();
  const double lambda_h = (2.0 - 2.0 * std::cos(k * h)) / (h * h);
  CHECK(snap.phi[0] ==
        doctest::Approx(std::exp(-lambda_h * t)).epsilon(0.01));
}

TEST_CASE("spatially constant run tracks the ODE in Phi") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  const double y0 = 1.0;
  const double phi_init = -nl.log_F(y0).log_magnitude;
  const RunResult res = reduction_run(nl, y0, 20.0);
  const double T = std::exp(nl.log_F(y0).log_magnitude);

  // (a) Early window, against the true blow-up time: within the first five
  // units of Phi the fixed-time comparison is well-conditioned and bounds
  // the integrator drift directly.
  double gap = T;
  for (size_t k = 1; k < res.snapshots.size(); ++k) {
    gap -= res.snapshots[k].dt_since_prev;
    const double dphi = res.snapshots[k].phi_center - phi_init;
    if (dphi > 5.0) break;
    const double err = std::abs(res.snapshots[k].phi_center + std::log(gap));
    CHECK(err <= 1e-4 * std::max(1.0, dphi));
  }

  // (b) Full span, against the run's own limit: near blow-up the comparison
  // must anchor on the trajectory's remaining-lifetime chain (a fixed-time
  // comparison against the a-priori T is exponentially ill-conditioned,
  // since dy/dT = f(y)).
  for (size_t k = 0; k < res.snapshots.size(); ++k) {
    if (!(res.estimate.s[k] > 0.0)) continue;
    const double dphi = res.snapshots[k].phi_center - phi_init;
    const double err = std::abs(res.snapshots[k].phi_center - res.estimate.s[k]);
    CHECK(err <= 1e-4 * std::max(1.0, dphi));
  }

  // T_k is constant for the exact flow, so the estimate lands on F(y0) and
  // the drift shows up only at the integrator scale.
  CHECK(res.estimate.T_est == doctest::Approx(T).epsilon(1e-4));
  CHECK(std::abs(res.estimate.T_est - T) <= 1e-5);
}

TEST_CASE("accepted steps preserve radial monotonicity") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  RadialGrid grid(1, 1.0, 64);
  InitialData init = make_initial_data(nle, grid, 0.45, true);
  RunSetup setup;
  setup.nl = nle;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.phi_stop = 10.0;
  const RunResult res = run_to_blowup(setup);
  for (const auto& snap : res.snapshots) {
    const double tol = 1e-9 * std::max(1.0, std::abs(snap.phi[0]));
    for (int j = 0; j + 1 <= grid.J; ++j) {
      CHECK(snap.phi[j + 1] <= snap.phi[j] + tol);
    }
  }
}

TEST_CASE("initial data: supersolution verification and the growth rule") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 1.0, 64);
  { // A = 0.45 satisfies Delta u0 + f(u0) >= 0 as-is (2nA/R^2 = 0.9 < 1)
    InitialData init = make_initial_data(nl, grid, 0.45, true);
    CHECK(init.amplitude_used == 0.45);
    CHECK(init.supersolution_verified);
    CHECK(init.phi0[grid.J] ==
          doctest::Approx(-nl.log_F(0.0).log_magnitude).epsilon(1e-13));
  }
  { // A = 0.6 violates it near the boundary; the documented search grows A
    // until the discrete near-boundary node (u0 = 2Ah) carries enough
    // reaction on its own. The result is huge and unusable downstream, but
    // the rule is the rule.
    InitialData init = make_initial_data(nl, grid, 0.6, true);
    CHECK(init.amplitude_used > 50.0);
    CHECK(init.supersolution_verified);
  }
  { // on a fine grid the 50-step search runs out before the condition holds
    RadialGrid fine(1, 1.0, 4096);
    CHECK_THROWS_AS(make_initial_data(nl, fine, 0.6, true), ConfigError);
  }
  { // without the check any amplitude is accepted
    InitialData init = make_initial_data(nl, grid, 2.0, false);
    CHECK(init.amplitude_used == 2.0);
    CHECK_FALSE(init.supersolution_verified);
  }
  { // q >= 1 has f(0) = 0: the check is unsatisfiable and rejected upfront
    const Nonlinearity nl21 = Nonlinearity::super_exponential(2, 1);
    CHECK_THROWS_AS(make_initial_data(nl21, grid, 3.0, true), ConfigError);
    InitialData init = make_initial_data(nl21, grid, 3.0, false);
    CHECK(init.phi0[grid.J] == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("run to blow-up: exponential base case") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  RadialGrid grid(1, 1.0, 64);
  InitialData init = make_initial_data(nle, grid, 0.45, true);
  RunSetup setup;
  setup.nl = nle;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.phi_stop = 16.0;
  const RunResult res = run_to_blowup(setup);
  CHECK(res.accepted_steps < 5'000'000);
  CHECK(res.snapshots.size() >= 15);
  for (size_t k = 1; k < res.snapshots.size(); ++k) {
    CHECK(res.snapshots[k].umax > res.snapshots[k - 1].umax);
  }
  CHECK(res.estimate.method == "aitken");
  CHECK(res.estimate.T_est > 2.0);
  CHECK(res.estimate.T_est < 4.0);
  CHECK(std::isfinite(res.estimate.uncertainty));

  // Estimate stability: recomputing from a 6-snapshot-shorter prefix moves
  // T_est by less than 1e-6 relative.
  std::vector<Snapshot> prefix(res.snapshots.begin(), res.snapshots.end() - 6);
  const BlowupEstimate early = estimate_blowup_time(prefix);
  CHECK(std::abs(early.T_est - res.estimate.T_est) <=
        1e-6 * res.estimate.T_est);

  // Comparison with the space-free rate: v(0, s) >= 1 (center value
  // dominates the ODE started from the same remaining lifetime).
  for (size_t k = 0; k < res.snapshots.size(); ++k) {
    if (!(res.estimate.s[k] > 0.0)) continue;
    const double log_v0 = res.snapshots[k].phi_center + res.estimate.log_gap[k];
    CHECK(log_v0 >= std::log(1.0 - 5e-2));
  }
}

TEST_CASE("small data exhausts the time budget as global-existence-suspected") {
  // On a subcritical ball (R below the threshold where bounded steady
  // states disappear) small data relaxes to equilibrium instead of blowing
  // up; the run must end with the explicit suspected-global-existence error.
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  RadialGrid grid(1, 0.8, 64);
  InitialData init = make_initial_data(nle, grid, 0.2, true);
  RunSetup setup;
  setup.nl = nle;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.phi_stop = 400.0;
  setup.t_max = 2.0;
  CHECK_THROWS_AS((void)run_to_blowup(setup), GlobalExistenceSuspected);
}

TEST_CASE("step budget exhaustion is a distinct numerical error") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  RadialGrid grid(1, 1.0, 64);
  InitialData init = make_initial_data(nle, grid, 0.45, true);
  RunSetup setup;
  setup.nl = nle;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.phi_stop = 16.0;
  setup.max_steps = 1000;
  CHECK_THROWS_AS((void)run_to_blowup(setup), NumericalError);
}

TEST_CASE("non-finite field entries are rejected with the node named") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 1.0, 64);
  std::vector<double> phi(grid.nodes(), 1.0);
  phi[17] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS((void)rhs_phi(nl, grid, phi, BoundaryMode::PhiSpace),
                       doctest::Contains("node"), NumericalError);
}

TEST_CASE("a non-monotone blow-up time sequence is flagged, not fatal") {
  // Synthetic snapshots whose T_k = t_k + F_k wobbles by more than the
  // extrapolation spread: dt chosen as the exact F-drop plus an
  // alternating error.
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  std::vector<Snapshot> snaps(8);
  double prev_F = 0.0;
  for (size_t k = 0; k < snaps.size(); ++k) {
    snaps[k].phi_center = 1.0 + double(k);
    snaps[k].phi.assign(3, snaps[k].phi_center);
    snaps[k].umax = nl.F_inverse_log(-snaps[k].phi_center);
    const double F = std::exp(-snaps[k].phi_center);
    if (k > 0) {
      const double eps = (k % 2 == 0 ? 1.0 : -1.0) * 5e-3 * F;
      snaps[k].dt_since_prev = (prev_F - F) + eps;
    }
    prev_F = F;
  }
  const BlowupEstimate est = estimate_blowup_time(snaps);
  CHECK(est.monotone_warning);
}

TEST_CASE("estimate preconditions") {
  const Nonlinearity nle = Nonlinearity::pure_exponential();
  std::vector<Snapshot> snaps(3);
  CHECK_THROWS_AS((void)estimate_blowup_time(snaps), DomainError);
  snaps.resize(6);
  for (size_t k = 0; k < snaps.size(); ++k) {
    snaps[k].umax = 1.0; // not increasing
    snaps[k].phi_center = 1.0;
  }
  CHECK_THROWS_AS((void)estimate_blowup_time(snaps), DomainError);
  (void)nle;
}

TEST_CASE("Richardson: center value converges at order >= 1.8 in h") {
  // Phi(0, t*) from three grids at a fixed early time, linearly
  // interpolated between the steps straddling t*.
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  const double t_star = 0.0035;
  auto center_at = [&](int J) {
    RadialGrid grid(1, 1.0, J);
    InitialData init = make_initial_data(nl, grid, 2.0, false);
    CoefficientTable coeff(nl, 40.0);
    Snapshot snap;
    snap.phi = init.phi0;
    snap.phi_center = snap.phi[0];
    StepController ctrl;
    double prev_t = 0.0, prev_phi = snap.phi[0];
    while (snap.t < t_star) {
      prev_t = snap.t;
      prev_phi = snap.phi[0];
      step(nl, coeff, grid, snap, ctrl, BoundaryMode::PhiSpace);
    }
    const double w = (t_star - prev_t) / (snap.t - prev_t);
    return prev_phi + w * (snap.phi[0] - prev_phi);
  };
  const double c64 = center_at(64);
  const double c128 = center_at(128);
  const double c256 = center_at(256);
  const double order = std::log2(std::abs(c64 - c128) / std::abs(c128 - c256));
  CHECK(order >= 1.8);
}

TEST_CASE("center value is nondecreasing for supersolution data") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 2.0, 64);
  InitialData init = make_initial_data(nl, grid, 1.8, true);
  REQUIRE(init.supersolution_verified);
  RunSetup setup;
  setup.nl = nl;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.phi_stop = 20.0;
  const RunResult res = run_to_blowup(setup);
  for (size_t k = 1; k < res.snapshots.size(); ++k) {
    CHECK(res.snapshots[k].phi_center >=
          res.snapshots[k - 1].phi_center - 1e-12);
  }
}

TEST_CASE("reference run: estimate uncertainty is tight") {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 2.0, 128);
  InitialData init = make_initial_data(nl, grid, 1.8, true);
  RunSetup setup;
  setup.nl = nl;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.phi_stop = 30.0;
  const RunResult res = run_to_blowup(setup);
  CHECK(res.accepted_steps < 5'000'000);
  // uncertainty relative to the resolved window
  const double window = res.estimate.T_est - res.snapshots.front().t;
  CHECK(res.estimate.uncertainty / window <= 1e-4);
  CHECK_FALSE(res.estimate.monotone_warning);
}
