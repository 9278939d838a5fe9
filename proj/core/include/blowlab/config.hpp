#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blowlab/nonlinearity.hpp"

namespace blowlab {

// A run is fully described by one TOML-style text file; every physics
// default lives in the bundled configs, not in code, so a config hash pins
// the reference runs.
struct RunConfig {
  struct Nl {
    double p = 2.0;
    double q = 0.0;
    std::string family = "super_exponential";
  } nl;
  struct Grid {
    int n = 1;
    double R = 1.0;
    int J = 256;
  } grid;
  struct Init {
    std::string profile = "parabola";
    double amplitude = 0.45;
    bool supersolution_check = true;
  } init;
  struct Solver {
    double phi_stop = 400.0;
    double safety = 0.45;
    double tol = 5e-5;
    double t_max = 1e30;
    long max_steps = 5'000'000;
  } solver;
  struct Analysis {
    double alpha = 0.0; // 0 = default 1/(2p)
    double c_compact = 1.0;
    int y_resolution = 257;
    double snapshot_delta_phi = 1.0;
    double y_max = 0.0; // 0 = uncapped
    // Radial fraction next to the Dirichlet boundary excluded from
    // residual-style diagnostics when q >= 1 (u ~ 0 there makes f'F and
    // the Phi-derivatives singular); the width is reported, never hidden.
    double boundary_layer_fraction = 0.03;
  } analysis;
  struct Ode {
    double y0 = 1.0;
    double stop_value = 10.0;
    double rel_tol = 1e-8;
  } ode;
  std::string output_dir = "out";

  std::string raw_text;    // exact file contents, hashed for provenance
  std::string config_hash; // fnv1a-64 of raw_text, hex
  std::vector<std::string> warnings;

  Nonlinearity nonlinearity() const;
  double alpha_or_default() const {
    return analysis.alpha > 0.0 ? analysis.alpha : 1.0 / (2.0 * nl.p);
  }
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

// Validation lives apart from parsing so CLI overrides are re-validated.
void validate_config(RunConfig& cfg);

std::string fnv1a_hex(const std::string& text);

} // namespace blowlab
