#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltmpc/models.hpp"
#include "ltmpc/obstacle.hpp"

namespace ltmpc {

/// One closed-loop step record. State and control slots not used by a model
/// stay at zero; tire channels are meaningful for the double-track planner
/// and carry the loads implied by the logged accelerations otherwise.
struct LogRow {
    double time = 0.0;
    std::array<double, kMaxStates> state{};
    std::array<double, kNumControls> control{};
    int iterations = 0;
    std::string solve_status;
    double kkt_residual = 0.0;
    double solve_time = 0.0;   ///< wall clock [s]; excluded from the CSV (see timings file)
    double f_z[4] = {0, 0, 0, 0};       ///< fl, fr, rl, rr [N]
    double alpha[4] = {0, 0, 0, 0};     ///< fl, fr, rl, rr [rad]
    double f_y[4] = {0, 0, 0, 0};       ///< fl, fr, rl, rr [N]
    double df_zf = 0.0, df_zr = 0.0;
    double x_global = 0.0, y_global = 0.0, psi_global = 0.0;
    double a_x = 0.0, a_y = 0.0;
    std::vector<double> collision_residuals;  ///< per obstacle, slack at zero
    double min_obstacle_distance = kInf;
    bool wheel_lift = false;
};

struct TrajectoryLog {
    std::string scenario;
    std::string run_label;   ///< e.g. "doubletrack_hcg1.05"
    ModelKind kind = ModelKind::particle;
    double t_s = 0.1;
    double hcg_scale = 1.0;
    bool completed = true;   ///< false when truncated by solver failure
    std::string failure_reason;
    std::vector<LogRow> rows;
    std::vector<Obstacle> obstacles;
};

/// Column names of the per-step CSV, in emission order.
std::vector<std::string> csv_columns(ModelKind kind, std::size_t n_obstacles);

/// Writes the log as CSV with full round-trip double precision; wall-clock
/// solve times are deliberately not part of this file so that reruns are
/// bitwise identical.
void write_csv(const TrajectoryLog& log, std::ostream& os);
void write_csv_file(const TrajectoryLog& log, const std::string& path);

/// Per-step wall-clock solve times (not deterministic across reruns).
void write_timings_csv(const std::vector<TrajectoryLog>& logs, std::ostream& os);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace ltmpc
