#include "blowlab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "blowlab/artifacts.hpp"
#include "blowlab/diagnostics.hpp"
#include "blowlab/errors.hpp"
#include "blowlab/ode.hpp"
#include "blowlab/quadrature.hpp"
#include "blowlab/selfsimilar.hpp"
#include "blowlab/solver.hpp"

namespace blowlab {

namespace {

std::string run_id_of(const RunConfig& cfg) { return cfg.config_hash.substr(0, 12); }

OutputLayout layout_for(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  OutputLayout l;
  l.root = out_dir.empty() ? std::filesystem::path(cfg.output_dir) : out_dir;
  return l;
}

struct LoadedRun {
  Manifest manifest;
  RadialGrid grid;
  std::vector<Snapshot> snapshots;
  BlowupEstimate estimate;
};

LoadedRun load_run(const RunConfig& cfg, const OutputLayout& out) {
  if (!std::filesystem::exists(out.manifest())) {
    throw ConfigError("missing artifacts: manifest (run `simulate` first): " +
                      out.manifest().string());
  }
  LoadedRun run;
  run.manifest = read_manifest(out.manifest());
  if (run.manifest.config_hash != cfg.config_hash) {
    throw ConfigError("config hash mismatch: artifacts in " + out.root.string() +
                      " were produced by a different config");
  }
  for (const auto& rel : run.manifest.snapshot_files) {
    RadialGrid grid;
    run.snapshots.push_back(read_snapshot(out.root / rel, &grid));
    run.grid = grid;
  }
  if (run.snapshots.empty()) {
    throw ConfigError("missing artifacts: snapshots");
  }
  // Everything downstream is recomputed from the persisted snapshots; the
  // manifest copy of the estimate is advisory.
  run.estimate = estimate_blowup_time(run.snapshots);
  return run;
}

void parallel_for(int threads, int count, const std::function<void(int)>& body) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2 * threads) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace

int cmd_verify_fn(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  std::ostream& log) {
  const Nonlinearity nl = cfg.nonlinearity();
  const OutputLayout out = layout_for(cfg, out_dir);
  std::filesystem::create_directories(out.ledgers_dir());

  int failures = 0;
  auto fail_row = [&](const std::string& what, double u, double got, double bound) {
    ++failures;
    log << "verify-fn FAIL " << what << " at u = " << u << ": " << got
        << " vs bound " << bound << "\n";
  };

  const double l = nl.family() == Family::SuperExponential ? nl.threshold_l() : 0.0;
  std::ostringstream csv;
  csv << "u,F,Finv_of_F,fprimeF,deficit_times_rate\n";
  double prev_logF = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const double u = 0.5 + (50.0 - 0.5) * i / 199.0;
    const double logF = nl.log_F(u).log_magnitude;
    const double back = nl.F_inverse_log(logF);
    const double fpF = nl.fprime_F(u);
    const double deficit = nl.one_minus_fprime_F(u) *
                           (nl.p() * std::pow(u, nl.p()) + nl.q());
    csv << format_double(u) << ',' << format_double(std::exp(logF)) << ','
        << format_double(back) << ',' << format_double(fpF) << ','
        << format_double(deficit) << '\n';

    if (std::abs(back - u) > 1e-10 * std::max(1.0, u)) {
      fail_row("round_trip", u, back, u);
    }
    if (!(logF < prev_logF)) fail_row("log_F_monotone", u, logF, prev_logF);
    prev_logF = logF;
    if (nl.family() == Family::SuperExponential && u >= l) {
      if (fpF > 1.0 + 1e-9) fail_row("fprimeF_bound", u, fpF, 1.0 + 1e-9);
      if (deficit > 10.0) fail_row("deficit_rate", u, deficit, 10.0);
    }
    // (log F)' = -1/(fF) against a centered difference.
    const double h = 1e-5 * std::max(1.0, u);
    const double fd = (nl.log_F(u + h).log_magnitude - nl.log_F(u - h).log_magnitude) /
                      (2.0 * h);
    const double analytic = -std::exp(-(nl.log_f(u) + logF));
    if (std::abs(fd - analytic) > 1e-6 * std::abs(analytic)) {
      fail_row("logF_derivative", u, fd, analytic);
    }
  }
  {
    const double S = 184.0;
    const double ratio = nl.F_inverse_log(-S) / std::pow(S, 1.0 / nl.p());
    if (std::abs(ratio - 1.0) > 0.05) fail_row("inverse_asymptote", S, ratio, 1.05);
  }
  if (nl.family() == Family::PureExponentialReference) {
    for (double u : {0.5, 1.0, 3.0, 10.0}) {
      if (std::abs(nl.log_F(u).log_magnitude + u) > 1e-12) {
        fail_row("closed_form_exp", u, nl.log_F(u).log_magnitude, -u);
      }
    }
  }
  if (nl.family() == Family::PowerReference) {
    for (double u : {0.5, 1.0, 2.0, 10.0}) {
      const double expect = std::pow(u, 1.0 - nl.p()) / (nl.p() - 1.0);
      if (std::abs(nl.F(u) - expect) > 1e-12 * expect) {
        fail_row("closed_form_power", u, nl.F(u), expect);
      }
    }
  }

  const auto table_path = out.ledgers_dir() / "nonlinearity_table.csv";
  std::filesystem::create_directories(table_path.parent_path());
  std::ofstream(table_path) << csv.str();
  log << "wrote " << table_path.string() << "\n";
  log << "verify-fn: " << (failures == 0 ? "pass" : "FAIL") << " for (p, q) = ("
      << nl.p() << ", " << nl.q() << ") family " << nl.family_name() << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_ode(const RunConfig& cfg, const std::filesystem::path& out_dir,
            std::ostream& log) {
  const Nonlinearity nl = cfg.nonlinearity();
  const OutputLayout out = layout_for(cfg, out_dir);
  std::filesystem::create_directories(out.ledgers_dir());

  const OdeRun run = ode_integrate(nl, cfg.ode.y0, cfg.ode.stop_value, cfg.ode.rel_tol);
  std::ostringstream csv;
  csv << "t,y,F_of_y,gap,log_gap\n";
  for (const auto& s : run.samples) {
    csv << format_decimal(s.t) << ',' << format_double(s.y) << ','
        << format_double(nl.F(s.y)) << ',' << format_double(std::exp(s.log_gap))
        << ',' << format_double(s.log_gap) << '\n';
  }
  const auto path = out.ledgers_dir() / "ode.csv";
  std::ofstream(path) << csv.str();
  log << "wrote " << path.string() << "\n";
  log << "ode: T = " << run.T << " (log T = " << run.log_T << "), "
      << run.samples.size() << " samples, " << run.accepted_steps
      << " accepted steps\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir,
                 bool force, std::ostream& log) {
  const OutputLayout out = layout_for(cfg, out_dir);
  if (std::filesystem::exists(out.manifest()) && !force) {
    throw ConfigError("output dir " + out.root.string() +
                      " already holds a run; pass --force to overwrite");
  }
  if (force) {
    std::filesystem::remove_all(out.snapshots_dir());
    std::filesystem::remove_all(out.frames_dir());
    std::filesystem::remove_all(out.ledgers_dir());
    std::filesystem::remove(out.manifest());
    std::filesystem::remove(out.report_json());
    std::filesystem::remove(out.report_md());
  }
  std::filesystem::create_directories(out.snapshots_dir());

  const Nonlinearity nl = cfg.nonlinearity();
  const RadialGrid grid(cfg.grid.n, cfg.grid.R, cfg.grid.J);
  const InitialData init = make_initial_data(nl, grid, cfg.init.amplitude,
                                             cfg.init.supersolution_check);

  RunSetup setup;
  setup.nl = nl;
  setup.grid = grid;
  setup.phi0 = init.phi0;
  setup.controller.safety = cfg.solver.safety;
  setup.controller.tol = cfg.solver.tol;
  setup.phi_stop = cfg.solver.phi_stop;
  setup.snapshot_delta_phi = cfg.analysis.snapshot_delta_phi;
  setup.t_max = cfg.solver.t_max;
  setup.max_steps = cfg.solver.max_steps;

  Manifest m;
  int index = 0;
  setup.on_snapshot = [&](const Snapshot& snap) {
    const auto path = out.snapshot(index);
    write_snapshot(path, snap, grid);
    m.snapshot_files.push_back(
        std::filesystem::relative(path, out.root).generic_string());
    ++index;
  };

  const RunResult result = run_to_blowup(setup);

  m.run_id = run_id_of(cfg);
  m.config_hash = cfg.config_hash;
  m.family = cfg.nl.family;
  m.p = nl.p();
  m.q = nl.q();
  m.grid = cfg.grid;
  m.estimate = result.estimate;
  m.accepted_steps = result.accepted_steps;
  m.retried_steps = result.retried_steps;
  m.amplitude_used = init.amplitude_used;
  m.supersolution_verified = init.supersolution_verified;
  m.warnings = cfg.warnings;
  write_manifest(out.manifest(), m);

  log << "wrote " << out.manifest().string() << "\n";
  log << "simulate: " << result.snapshots.size() << " snapshots, "
      << result.accepted_steps << " steps, T_est = " << result.estimate.T_est
      << ", log gap at stop = " << result.estimate.log_gap_last << "\n";
  return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& out_dir,
                int threads, std::ostream& log) {
  const OutputLayout out = layout_for(cfg, out_dir);
  LoadedRun run = load_run(cfg, out);
  const Nonlinearity nl = cfg.nonlinearity();
  const BoundaryMode mode = boundary_mode_for(nl);
  const double alpha = cfg.alpha_or_default();
  const double y_cap = cfg.analysis.y_max > 0.0 ? cfg.analysis.y_max : 1e300;

  std::filesystem::create_directories(out.frames_dir());
  std::filesystem::create_directories(out.ledgers_dir());

  // Frames for every snapshot with s >= 1 (the self-similar clock must have
  // started); index-matched with snapshots.
  std::vector<int> frame_index;
  for (size_t k = 0; k < run.snapshots.size(); ++k) {
    if (run.estimate.s[k] >= 1.0) frame_index.push_back(static_cast<int>(k));
  }
  std::vector<SelfSimilarFrame> frames(frame_index.size());
  parallel_for(threads, static_cast<int>(frame_index.size()), [&](int i) {
    const int k = frame_index[i];
    frames[i] = to_frame(run.snapshots[k], run.grid, run.estimate.log_gap[k],
                         alpha, cfg.analysis.y_resolution, y_cap, mode);
  });

  Manifest m = run.manifest;
  m.estimate = run.estimate;
  m.frame_files.clear();
  for (size_t i = 0; i < frames.size(); ++i) {
    const auto path = out.frame(frame_index[i]);
    write_frame(path, frames[i]);
    m.frame_files.push_back(std::filesystem::relative(path, out.root).generic_string());
  }

  double phi_top = 0.0;
  for (const auto& s : run.snapshots) phi_top = std::max(phi_top, s.phi_center);
  const CoefficientTable coeff(nl, phi_top + 5.0);

  std::vector<EnergyRecord> records;
  for (size_t i = 1; i + 1 < frames.size(); ++i) {
    records.push_back(energy(frames[i], frames[i - 1], frames[i + 1], coeff));
  }
  // Per-interval slack: three times the local equation residual, the
  // documented discretization allowance (and a ledger column of its own).
  std::vector<double> frame_residual(frames.size(), 0.0);
  for (size_t i = 1; i + 1 < frames.size(); ++i) {
    frame_residual[i] =
        residual_veq(frames[i - 1], frames[i], frames[i + 1], coeff);
  }
  std::vector<IntervalLedgerEntry> intervals;
  if (records.size() >= 2) {
    std::vector<double> slack(records.size() - 1, 0.0);
    for (size_t k = 0; k + 1 < records.size(); ++k) {
      // records[k] sits on frames[k+1]
      slack[k] = 3.0 * std::max(frame_residual[k + 1], frame_residual[k + 2]);
    }
    intervals = energy_inequality_check(records, slack);
  }
  const auto energy_path = out.ledgers_dir() / "energy.csv";
  write_energy_ledger(energy_path, records, intervals);
  m.ledger_files.clear();
  m.ledger_files.push_back(
      std::filesystem::relative(energy_path, out.root).generic_string());
  write_manifest(out.manifest(), m);

  log << "wrote " << out.manifest().string() << "\n";
  log << "wrote " << energy_path.string() << "\n";
  log << "analyze: " << frames.size() << " frames, " << records.size()
      << " energy records\n";
  return 0;
}

int cmd_report(const RunConfig& cfg, const std::filesystem::path& out_dir,
               std::ostream& log) {
  const OutputLayout out = layout_for(cfg, out_dir);
  LoadedRun run = load_run(cfg, out);
  const Nonlinearity nl = cfg.nonlinearity();

  std::vector<std::string> missing;
  if (run.manifest.frame_files.empty()) missing.push_back("frames");
  if (run.manifest.ledger_files.empty()) missing.push_back("ledgers");
  if (!missing.empty()) {
    std::string what = "missing artifacts:";
    for (const auto& mname : missing) what += " " + mname;
    throw ConfigError(what + " (run `analyze` first)");
  }

  RunArtifacts art;
  art.nl = nl;
  art.grid = run.grid;
  art.snapshots = std::move(run.snapshots);
  art.estimate = run.estimate;
  for (const auto& rel : run.manifest.frame_files) {
    art.frames.push_back(read_frame(out.root / rel));
  }
  double phi_top = 0.0;
  for (const auto& s : art.snapshots) phi_top = std::max(phi_top, s.phi_center);
  const CoefficientTable coeff(nl, phi_top + 5.0);
  for (size_t i = 1; i + 1 < art.frames.size(); ++i) {
    art.energy_records.push_back(
        energy(art.frames[i], art.frames[i - 1], art.frames[i + 1], coeff));
  }
  art.alpha = cfg.alpha_or_default();
  art.c_compact = cfg.analysis.c_compact;
  art.boundary_layer_fraction = cfg.analysis.boundary_layer_fraction;
  art.supersolution_verified = run.manifest.supersolution_verified;
  art.run_id = run.manifest.run_id;
  art.config_hash = cfg.config_hash;

  const DiagnosticsReport rep = assemble_report(art);
  write_report_json(out.report_json(), rep);
  write_report_md(out.report_md(), rep);

  // Series ledgers backing the headline checks, indexed in the manifest.
  const auto mt = profile_limit_check(art.frames, art.c_compact);
  write_series_csv(out.ledgers_dir() / "profile_limit.csv", "s,sup_dev", mt.deviation);
  const auto ha = h_alpha_check(art.snapshots, art.grid, nl, art.estimate, art.alpha,
                                boundary_mode_for(nl));
  write_series_csv(out.ledgers_dir() / "h_alpha.csv", "s,ratio", ha.ratio);
  {
    Manifest m = run.manifest;
    m.estimate = run.estimate;
    for (const char* name : {"profile_limit.csv", "h_alpha.csv"}) {
      const auto rel = std::filesystem::relative(out.ledgers_dir() / name, out.root)
                           .generic_string();
      if (std::find(m.ledger_files.begin(), m.ledger_files.end(), rel) ==
          m.ledger_files.end()) {
        m.ledger_files.push_back(rel);
      }
    }
    write_manifest(out.manifest(), m);
  }

  log << "wrote " << out.report_json().string() << "\n";
  log << "wrote " << out.report_md().string() << "\n";
  for (const auto& c : rep.checks) {
    log << "  [" << verdict_name(c.verdict) << "] " << c.name
        << " (statistic = " << c.statistic << ")\n";
  }
  return rep.any_fail() ? 1 : 0;
}

int cmd_all(const RunConfig& cfg, const std::filesystem::path& out_dir,
            bool force, int threads, std::ostream& log) {
  int rc = cmd_simulate(cfg, out_dir, force, log);
  if (rc != 0) return rc;
  rc = cmd_analyze(cfg, out_dir, threads, log);
  if (rc != 0) return rc;
  return cmd_report(cfg, out_dir, log);
}

} // namespace blowlab
