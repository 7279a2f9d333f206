#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dipspin/analysis.hpp"
#include "dipspin/config.hpp"
#include "dipspin/dynamics.hpp"
#include "dipspin/table_io.hpp"

namespace dipspin {

/// Columns t, e_x, e_y, e_z, energy, total_ez, max_norm_drift.
Table trajectory_table(const Trajectory& traj, std::vector<std::string> comments = {});
/// Columns omega, amplitude.
Table spectrum_table(const Spectrum& spec, std::vector<std::string> comments = {});

struct RunOutput {
  std::vector<std::filesystem::path> files;
  Summary summary;
};

/// Runs the configured experiment and writes its tables and summary.txt
/// into cfg.out_dir (created if missing).
RunOutput run(const RunConfig& cfg);

}  // namespace dipspin
