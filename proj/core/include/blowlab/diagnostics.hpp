#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowlab/grid.hpp"
#include "blowlab/nonlinearity.hpp"
#include "blowlab/selfsimilar.hpp"
#include "blowlab/solver.hpp"

namespace blowlab {

enum class Verdict { Pass, Fail, Info };

std::string verdict_name(Verdict v);

// One entry of the report ledger. `claim` states the inequality or limit
// being measured in plain words; `statistic` is the measured number the
// verdict was derived from, and `threshold` the policy value it was held
// against, so a reader can re-judge with their own threshold.
struct CheckResult {
  std::string name;
  std::string claim;
  double statistic = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::Info;
  std::string notes;
};

struct SeriesPoint {
  double s = 0.0;
  double value = 0.0;
};

// Median-of-pairwise-slopes; robust against the oscillatory approach to
// the limit.
double theil_sen_slope(std::span<const SeriesPoint> series);

// Trend policy: nonincreasing if the slope is negative outright, or if the
// total change over the window is below 5% of the window median (the series
// has hit its discretization floor, where the sign of the slope is rounding
// noise).
struct TrendResult {
  double slope = 0.0;
  bool nonincreasing = false;
};
TrendResult trend_nonincreasing(std::span<const SeriesPoint> series);

struct ProfileLimitResult {
  std::vector<SeriesPoint> deviation; // sup_{|y|<=C} |v - 1| per frame
  CheckResult check;
};

ProfileLimitResult profile_limit_check(std::span<const SelfSimilarFrame> frames,
                                     double c_compact);

struct HAlphaResult {
  std::vector<SeriesPoint> ratio; // h_alpha / F^{-1}(T - t)
  CheckResult check;
};

HAlphaResult h_alpha_check(std::span<const Snapshot> snapshots,
                           const RadialGrid& grid, const Nonlinearity& nl,
                           const BlowupEstimate& est, double alpha,
                           BoundaryMode mode);

struct DerivativeEstimateResult {
  std::vector<SeriesPoint> first_order;  // sqrt(T-t) sup |grad u| / (fF)
  std::vector<SeriesPoint> second_order; // (T-t) sup |grad^2 u| / (fF)
  CheckResult check;
};

DerivativeEstimateResult derivative_estimate_check(
    std::span<const Snapshot> snapshots, const RadialGrid& grid,
    const Nonlinearity& nl, const BlowupEstimate& est, BoundaryMode mode,
    double boundary_layer_fraction, const CoefficientTable* coeff = nullptr);

// Discrete defect of the scaled field u_lambda = Phi(lambda x, lambda^2 t)
// + 2 log lambda against its own equation, evaluated on a snapshot triple;
// returns the residual relative to the dominant reaction scale.
double quasiscaling_residual(const Snapshot& early, const Snapshot& mid,
                             const Snapshot& late, const RadialGrid& grid,
                             const Nonlinearity& nl, double lambda,
                             BoundaryMode bmode,
                             double exclude_boundary_fraction = 0.0);

struct LocalizationResult {
  std::vector<CheckResult> probes;
  CheckResult check;
};

LocalizationResult localization_check(std::span<const Snapshot> snapshots,
                                      const RadialGrid& grid,
                                      const Nonlinearity& nl,
                                      BoundaryMode mode);

struct DiagnosticsReport {
  std::string run_id;
  std::string config_hash;
  std::string code_name;
  std::string code_version;
  std::vector<CheckResult> checks;
  bool any_fail() const;
};

// Everything the report needs, reconstructible from persisted artifacts.
struct RunArtifacts {
  Nonlinearity nl = Nonlinearity::pure_exponential();
  RadialGrid grid;
  std::vector<Snapshot> snapshots;
  BlowupEstimate estimate;
  std::vector<SelfSimilarFrame> frames;
  std::vector<EnergyRecord> energy_records;
  double alpha = 0.25;
  double c_compact = 1.0;
  double boundary_layer_fraction = 0.03;
  bool supersolution_verified = false;
  std::string run_id;
  std::string config_hash;
};

DiagnosticsReport assemble_report(const RunArtifacts& art);

} // namespace blowlab
