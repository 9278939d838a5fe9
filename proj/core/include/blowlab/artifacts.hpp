#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "blowlab/config.hpp"
#include "blowlab/diagnostics.hpp"
#include "blowlab/selfsimilar.hpp"
#include "blowlab/solver.hpp"

namespace blowlab {

// out_dir/{manifest.json, snapshots/*.json, frames/*.json, ledgers/*.csv,
// report.json, report.md}. All writers are deterministic: fixed key order,
// 17-significant-digit floats, no timestamps anywhere.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path snapshots_dir() const { return root / "snapshots"; }
  std::filesystem::path frames_dir() const { return root / "frames"; }
  std::filesystem::path ledgers_dir() const { return root / "ledgers"; }
  std::filesystem::path report_json() const { return root / "report.json"; }
  std::filesystem::path report_md() const { return root / "report.md"; }
  std::filesystem::path snapshot(int index) const;
  std::filesystem::path frame(int index) const;
};

// %.17g rendering shared by every writer.
std::string format_double(double x);
// Exponent-free decimal with 17 significant digits (the t field).
std::string format_decimal(double x);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap,
                    const RadialGrid& grid);
Snapshot read_snapshot(const std::filesystem::path& path, RadialGrid* grid_out);

void write_frame(const std::filesystem::path& path, const SelfSimilarFrame& frame);
SelfSimilarFrame read_frame(const std::filesystem::path& path);

struct Manifest {
  std::string run_id;
  std::string config_hash;
  RunConfig::Grid grid;
  std::string family;
  double p = 0.0, q = 0.0;
  BlowupEstimate estimate;
  long accepted_steps = 0;
  long retried_steps = 0;
  double amplitude_used = 0.0;
  bool supersolution_verified = false;
  std::vector<std::string> snapshot_files;
  std::vector<std::string> frame_files;
  std::vector<std::string> ledger_files;
  std::vector<std::string> warnings;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

void write_energy_ledger(const std::filesystem::path& path,
                         std::span<const EnergyRecord> records,
                         std::span<const IntervalLedgerEntry> intervals);

void write_series_csv(const std::filesystem::path& path, const std::string& header,
                      std::span<const SeriesPoint> series);

void write_report_json(const std::filesystem::path& path,
                       const DiagnosticsReport& rep);
void write_report_md(const std::filesystem::path& path,
                     const DiagnosticsReport& rep);

} // namespace blowlab
