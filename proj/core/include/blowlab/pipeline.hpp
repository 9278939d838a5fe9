#pragma once

#include <filesystem>
#include <iosfwd>

#include "blowlab/config.hpp"

namespace blowlab {

// Command layer shared by the CLI binary and the test suites. Each command
// is idempotent for identical inputs and prints the artifact paths it
// wrote. Return value is the process exit code contribution:
//   0 = pass, 1 = check failure. Config and numerical errors are thrown
// (ConfigError -> 2, NumericalError and friends -> 3 at the CLI boundary).
int cmd_verify_fn(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  std::ostream& log);
int cmd_ode(const RunConfig& cfg, const std::filesystem::path& out_dir,
            std::ostream& log);
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir,
                 bool force, std::ostream& log);
int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& out_dir,
                int threads, std::ostream& log);
int cmd_report(const RunConfig& cfg, const std::filesystem::path& out_dir,
               std::ostream& log);
int cmd_all(const RunConfig& cfg, const std::filesystem::path& out_dir,
            bool force, int threads, std::ostream& log);

} // namespace blowlab
