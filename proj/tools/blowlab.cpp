// blowlab: simulate radial semilinear heat blow-up in the Phi = -log F(u)
// representation and check the self-similar asymptotics against the run.
//
// Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 numerical
// failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blowlab/config.hpp"
#include "blowlab/errors.hpp"
#include "blowlab/pipeline.hpp"
#include "blowlab/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  int threads = 1;
  // Leaf overrides; only applied when set.
  std::optional<double> phi_stop, alpha, amplitude, tol, safety, t_max;
  std::optional<double> snapshot_delta_phi, c_compact;
  std::optional<int> J, n;
  std::optional<double> R;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", o.config_path, "run configuration file");
  if (needs_config) opt->required();
  cmd->add_option("--out", o.out_dir, "output directory (overrides output.dir)");
  cmd->add_flag("--force", o.force, "overwrite an existing run");
  cmd->add_option("--threads", o.threads, "worker threads for analysis")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--phi-stop", o.phi_stop, "override solver.phi_stop");
  cmd->add_option("--alpha", o.alpha, "override analysis.alpha");
  cmd->add_option("--amplitude", o.amplitude, "override init.amplitude");
  cmd->add_option("--tol", o.tol, "override solver.tol");
  cmd->add_option("--safety", o.safety, "override solver.safety");
  cmd->add_option("--t-max", o.t_max, "override solver.t_max");
  cmd->add_option("--snapshot-delta-phi", o.snapshot_delta_phi,
                  "override analysis.snapshot_delta_phi");
  cmd->add_option("--c-compact", o.c_compact, "override analysis.c_compact");
  cmd->add_option("--J", o.J, "override grid.J");
  cmd->add_option("--n", o.n, "override grid.n");
  cmd->add_option("--R", o.R, "override grid.R");
}

blowlab::RunConfig resolve_config(const CommonOpts& o) {
  blowlab::RunConfig cfg = blowlab::load_config(o.config_path);
  if (o.phi_stop) cfg.solver.phi_stop = *o.phi_stop;
  if (o.alpha) cfg.analysis.alpha = *o.alpha;
  if (o.amplitude) cfg.init.amplitude = *o.amplitude;
  if (o.tol) cfg.solver.tol = *o.tol;
  if (o.safety) cfg.solver.safety = *o.safety;
  if (o.t_max) cfg.solver.t_max = *o.t_max;
  if (o.snapshot_delta_phi) cfg.analysis.snapshot_delta_phi = *o.snapshot_delta_phi;
  if (o.c_compact) cfg.analysis.c_compact = *o.c_compact;
  if (o.J) cfg.grid.J = *o.J;
  if (o.n) cfg.grid.n = *o.n;
  if (o.R) cfg.grid.R = *o.R;
  blowlab::validate_config(cfg);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial semilinear heat blow-up laboratory"};
  app.set_version_flag("--version",
                       std::string(blowlab::kCodeName) + " " + blowlab::kCodeVersion);
  app.require_subcommand(1);

  CommonOpts o_verify, o_ode, o_sim, o_ana, o_rep, o_all;
  auto* c_verify = app.add_subcommand(
      "verify-fn", "property suite and tables for f, F, F^{-1}, f'F");
  add_common(c_verify, o_verify);
  auto* c_ode = app.add_subcommand("ode", "closed-form vs adaptive ODE oracle CSV");
  add_common(c_ode, o_ode);
  auto* c_sim = app.add_subcommand("simulate", "run the PDE to blow-up, persist snapshots");
  add_common(c_sim, o_sim);
  auto* c_ana = app.add_subcommand("analyze", "build self-similar frames and ledgers");
  add_common(c_ana, o_ana);
  auto* c_rep = app.add_subcommand("report", "assemble the pass/fail report");
  add_common(c_rep, o_rep);
  auto* c_all = app.add_subcommand("all", "simulate + analyze + report");
  add_common(c_all, o_all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    using namespace blowlab;
    if (c_verify->parsed()) {
      return cmd_verify_fn(resolve_config(o_verify), o_verify.out_dir, std::cout);
    }
    if (c_ode->parsed()) {
      return cmd_ode(resolve_config(o_ode), o_ode.out_dir, std::cout);
    }
    if (c_sim->parsed()) {
      return cmd_simulate(resolve_config(o_sim), o_sim.out_dir, o_sim.force, std::cout);
    }
    if (c_ana->parsed()) {
      return cmd_analyze(resolve_config(o_ana), o_ana.out_dir, o_ana.threads, std::cout);
    }
    if (c_rep->parsed()) {
      return cmd_report(resolve_config(o_rep), o_rep.out_dir, std::cout);
    }
    if (c_all->parsed()) {
      return cmd_all(resolve_config(o_all), o_all.out_dir, o_all.force,
                     o_all.threads, std::cout);
    }
  } catch (const blowlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const blowlab::GlobalExistenceSuspected& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const blowlab::NumericalError& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return 3;
  } catch (const blowlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
