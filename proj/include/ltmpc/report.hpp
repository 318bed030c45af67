#pragma once

#include <string>
#include <vector>

#include "ltmpc/config_io.hpp"
#include "ltmpc/sim.hpp"

namespace ltmpc {

/// Exit codes of the CLI commands.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitRunFailure = 3,
    kExitValidationFailure = 4,
};

/// Executes every (scenario, planner, h_cg scale) combination of the
/// manifest, writing per-run CSV logs, a metrics table (text and CSV), a
/// timing file and SVG plots into the output directory. Independent runs may
/// execute on worker threads; each file has a single writer.
int run_command(const RunManifest& manifest, std::ostream& diag);

/// Runs the sine-steer model validation and writes the comparison plot.
/// Returns kExitOk when the yaw-rate RMS deviation is at or below
/// `threshold` (fraction, default 0.1).
int validate_command(const std::string& vehicle_file, const std::string& out_dir,
                     double threshold, std::ostream& diag);

/// Trajectory, state, load-transfer and tire plots for a set of logs.
void emit_plots(const std::vector<TrajectoryLog>& logs, const std::string& out_dir);

/// Plain-text metrics table (one row per run).
std::string metrics_table_text(const std::vector<MetricsReport>& reports);

/// Metrics as CSV; deterministic fields only (timings live in timings.csv).
std::string metrics_table_csv(const std::vector<MetricsReport>& reports);

std::string timing_table_text(const std::vector<MetricsReport>& reports);

}  // namespace ltmpc
