#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ltmpc/eight_dof.hpp"
#include "ltmpc/ocp.hpp"
#include "ltmpc/solver.hpp"
#include "ltmpc/trajectory_log.hpp"

namespace ltmpc {

/// One closed-loop experiment definition.
struct Scenario {
    std::string name;
    std::shared_ptr<const Road> road;
    std::vector<Obstacle> obstacles;
    double v0 = 20.0;              ///< ego initial speed [m/s]
    double y_e0 = 0.0;             ///< ego initial lateral offset [m]
    int horizon = 25;
    double t_s = 0.1;
    double duration = 12.0;        ///< simulated time [s]
    std::optional<double> a_y_max;
    double v_ref = 20.0;
    double lane_lower = -1.75;
    double lane_upper = 5.25;

    void validate() const;
};

/// Built-in scenarios: `linear_n25` (N = 25, lateral-acceleration cap at
/// 0.3 g) and `nonlinear_n13` (N = 13, no cap). Both share the same road and
/// obstacle layout: a static vehicle in the ego lane and an oncoming vehicle
/// in the adjacent lane.
Scenario build_scenario(const std::string& name);

std::vector<std::string> scenario_names();

/// Solver settings used by the receding-horizon loop; the first solve starts
/// from a high barrier value, warm-started re-solves from a low one.
struct HarnessSolverConfig {
    SolverConfig base;
    double mu_init_cold = 10.0;
    double mu_init_warm = 1e-3;
    bool warm_start = true;
    int plant_substeps = 10;
};

/// Closed-loop receding-horizon run of one planner model. The applied first
/// control drives the same model integrated at T_s/plant_substeps; for the
/// double-track model the plant uses one-step-lagged load accelerations.
TrajectoryLog run_receding_horizon(const Scenario& scenario, ModelKind kind,
                                   const VehicleParams& vehicle,
                                   const HarnessSolverConfig& solver_cfg);

struct PlannerMetrics {
    std::string planner;
    std::string run_label;
    int steps = 0;
    double mean_solve_time = 0.0;
    double max_solve_time = 0.0;
    double mean_iterations = 0.0;
    double peak_df_zf = 0.0;
    double peak_df_zr = 0.0;
    double peak_slip = 0.0;
    double peak_yaw_rate = 0.0;
    double peak_steer = 0.0;
    double peak_a_y = 0.0;
    double min_clearance = kInf;        ///< min Euclidean obstacle distance [m]
    double min_collision_residual = kInf;
    double rms_y_vs_reference = 0.0;    ///< vs the double-track log, when present
    double rms_yaw_vs_reference = 0.0;
    double rms_speed_vs_reference = 0.0;
};

struct MetricsReport {
    std::string scenario;
    std::vector<PlannerMetrics> rows;
};

/// Per-planner peaks plus RMS differences against the double-track log.
/// All logs must come from the same scenario.
MetricsReport compute_metrics(const std::vector<TrajectoryLog>& logs);

/// Open-loop sine-steer comparison between the double-track planner model
/// and the 8DOF reference (both at fine step), per channel.
struct ValidationReport {
    double amplitude = 0.0;       ///< steering amplitude used [rad]
    double peak_a_y = 0.0;        ///< 8DOF peak lateral acceleration [m/s^2]
    double rms_yaw_rate = 0.0;    ///< relative RMS deviations [-]
    double rms_v_y = 0.0;
    double rms_v_x = 0.0;
    double rms_f_z = 0.0;         ///< worst of the four vertical loads
    double peak_yaw_rate_dev = 0.0;
    std::vector<double> time;
    std::vector<double> yaw_rate_dt, yaw_rate_8dof;
    std::vector<double> v_y_dt, v_y_8dof;
};

struct ValidationOptions {
    double frequency = 0.5;     ///< sine steer frequency [Hz]
    double v0 = 20.0;           ///< initial speed [m/s]
    double duration = 10.0;     ///< run length [s]
    double step = 1e-3;         ///< integration step [s]
    double target_a_y = 0.3 * kGravity;  ///< amplitude is scaled to hit this peak
    bool keep_traces = false;
};

ValidationReport validate_planner_model(const VehicleParams& vehicle,
                                        const ValidationOptions& options = {});

}  // namespace ltmpc
