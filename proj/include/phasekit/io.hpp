#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasekit/config.hpp"

namespace phasekit {

/// %.17g, the CSV number format.
std::string format_double(double v);

/// Provenance string baked in at configure time (git describe).
const char* version_string();

void write_snapshot_csv(const std::filesystem::path& path, const FluidState& s);
void write_snapshot_csv(const std::filesystem::path& path, const BNState& s);

/// Snapshots as dir/snap_<k>.csv plus dir/index.csv (k, t).
void write_snapshots(const std::filesystem::path& dir, const std::vector<FluidState>& snaps);
void write_snapshots(const std::filesystem::path& dir, const std::vector<BNState>& snaps);

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records);

/// t, then the pairing against every dictionary entry.
void write_measure_summary_csv(const std::filesystem::path& path, const std::vector<double>& times,
                               const std::vector<ParamMeasure>& measures, const TestDictionary& dict);

void write_distances_csv(const std::filesystem::path& path, const std::vector<double>& times,
                         const std::vector<double>& dict_distance, const std::vector<double>& wasserstein);

/// n, sup_t_measure_dist, sup_t_u_err, dist_t<k>..., u_err_t<k>... for k over the snapshot times.
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report);

/// {"config": ..., "provenance": ..., "run": extra}.
void write_meta_json(const std::filesystem::path& path, const RunConfig& cfg, const nlohmann::ordered_json& run);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column by header name; throws ConfigError when missing.
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// FluidState from a snapshot CSV (x, rho, u, c).
FluidState read_fluid_snapshot(const std::filesystem::path& path, double t = 0.0);

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

}  // namespace phasekit
