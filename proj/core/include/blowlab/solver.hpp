#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowlab/grid.hpp"
#include "blowlab/interp.hpp"
#include "blowlab/nonlinearity.hpp"

namespace blowlab {

// One time slice of the evolved field Phi = -log F(u). Phi(0, t) tracks
// s = -log(T - t) near blow-up, so a run to Phi ~ 400 resolves remaining
// lifetimes that underflow any linear representation by hundreds of orders.
struct Snapshot {
  double t = 0.0;            // saturates once increments drop below eps * t
  double dt_since_prev = 0.0; // compensated sum of dt over the last interval
  std::vector<double> phi;   // Phi at nodes; phi[J] = -inf when the boundary
                             // cell lives in u-space (q >= 1)
  double umax = 0.0;         // u(0, t) recovered through F^{-1}
  double phi_center = 0.0;   // phi[0]
  long step_index = 0;
};

struct BlowupEstimate {
  double T_est = 0.0;
  double log_gap_last = 0.0; // log(T_est - t_last)
  std::string method;        // "aitken" | "last_value"
  double uncertainty = 0.0;
  bool monotone_warning = false;
  // Per-snapshot log(T_est - t_k), assembled from the difference chain
  // t_K - t_k and F_k = e^{-phi_center}; never from T_est - t in linear
  // arithmetic.
  std::vector<double> log_gap;
  std::vector<double> s; // -log_gap
};

// How the Dirichlet boundary is represented.
//   PhiSpace: q = 0, u = 0 maps to the finite constant Phi = -log F(0).
//   USpace:   q >= 1, F(0) = inf; the boundary node is pinned in u-space
//             and the J-1 stencils go one-sided.
//   NeumannZero: test hook (spatially homogeneous reductions).
enum class BoundaryMode { PhiSpace, USpace, NeumannZero };

BoundaryMode boundary_mode_for(const Nonlinearity& nl);

struct RhsOptions {
  bool reaction = true;  // e^{Phi}
  bool gradient = true;  // |grad Phi|^2 (f'F - 1)
};

// Dense lookup of the quasi-scaling coefficient f'F(u) - 1 as a function of
// Phi = -log F(u), so the inner loop never runs a Newton inversion. Falls
// back to direct evaluation below the tabulated range.
class CoefficientTable {
public:
  CoefficientTable() = default;
  CoefficientTable(const Nonlinearity& nl, double phi_hi);

  double operator()(double phi) const;
  bool constant() const { return constant_; }
  // Largest |f'F - 1| over the tabulated range; a cheap Jacobian bound for
  // the step controller.
  double max_abs() const { return max_abs_; }

private:
  Nonlinearity nl_ = Nonlinearity::pure_exponential();
  bool constant_ = true;
  double constant_value_ = 0.0;
  double max_abs_ = 0.0;
  MonotoneCubic table_;
  double phi_lo_ = 0.0, phi_hi_ = 0.0;
};

// Right-hand side of Phi_t = Delta Phi + e^{Phi} + |grad Phi|^2 (f'F(u) - 1)
// with u recovered pointwise from log F(u) = -Phi. The table overload is the
// fast path used inside the run loop; the direct overload evaluates the
// coefficient exactly and backs the standalone operation.
std::vector<double> rhs_phi(const Nonlinearity& nl, const RadialGrid& grid,
                            std::span<const double> phi,
                            BoundaryMode mode = BoundaryMode::PhiSpace,
                            const RhsOptions& opts = {});
std::vector<double> rhs_phi_tabulated(const CoefficientTable& coeff,
                                      const RadialGrid& grid,
                                      std::span<const double> phi,
                                      BoundaryMode mode,
                                      const RhsOptions& opts = {});

struct StepController {
  double safety = 0.45;   // fraction of the diffusion stability limit
  double tol = 5e-5;      // target Phi drift per unit Phi in the reaction phase
  int max_halvings = 40;  // retries when radial monotonicity breaks
  double monotonicity_tol = 1e-9; // relative to |Phi(0)|
};

struct StepStats {
  double dt = 0.0;
  int halvings = 0;
};

// One explicit midpoint (RK2) step with the diffusion/reaction dt limiter;
// halves dt and retries while the radially-nonincreasing invariant breaks.
StepStats step(const Nonlinearity& nl, const CoefficientTable& coeff,
               const RadialGrid& grid, Snapshot& snap,
               const StepController& ctrl, BoundaryMode mode,
               const RhsOptions& opts = {});

struct InitialData {
  std::vector<double> phi0;
  double amplitude_used = 0.0;
  bool supersolution_verified = false;
};

// u0 = A (1 - (r/R)^2)_+, mapped to Phi-space. With check_supersolution
// (q = 0), verifies Delta u0 + f(u0) >= 0 node-wise with the discrete
// Laplacian and grows A by 1.2x (at most 50 times) until it passes.
InitialData make_initial_data(const Nonlinearity& nl, const RadialGrid& grid,
                              double amplitude, bool check_supersolution);

struct RunSetup {
  Nonlinearity nl = Nonlinearity::pure_exponential();
  RadialGrid grid;
  std::vector<double> phi0;
  StepController controller;
  double phi_stop = 400.0;
  double snapshot_delta_phi = 1.0;
  double t_max = 1e30;
  long max_steps = 5'000'000;
  std::optional<BoundaryMode> boundary_override; // tests only
  std::function<void(const Snapshot&)> on_snapshot; // optional sink
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  BlowupEstimate estimate;
  long accepted_steps = 0;
  long retried_steps = 0;
};

// Integrate until Phi_max >= phi_stop, snapshotting at every crossing of
// the geometric Phi_max schedule. Raises GlobalExistenceSuspected when the
// t budget is exhausted first.
RunResult run_to_blowup(const RunSetup& setup);

// T_k = t_k + F(u(0, t_k)) assembled in offset form against the last
// snapshot, Aitken-extrapolated over the last five values.
BlowupEstimate estimate_blowup_time(std::span<const Snapshot> snapshots);

} // namespace blowlab
