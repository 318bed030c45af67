#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "ltmpc/models.hpp"
#include "ltmpc/nlp.hpp"
#include "ltmpc/obstacle.hpp"
#include "ltmpc/road.hpp"

namespace ltmpc {

/// Quadratic weights of the tracking cost plus the slip-angle penalty gain.
struct CostWeights {
    std::array<double, 3> q{10.0, 1.0, 1.0};     ///< on [y_e, v, v - zeta_CA]
    std::array<double, 3> r{50.0, 1e-4, 1.0};    ///< on input rates
    std::array<double, 3> s{1.0, 1e-6, 1e-2};    ///< on input magnitudes
    double t_alpha = 100.0;                      ///< slip-angle hinge weight

    static CostWeights defaults(ModelKind kind);
};

/// One receding-horizon problem description. Immutable once built; the
/// harness creates a fresh spec per solve with the current previous input.
struct OcpSpec {
    ModelKind kind = ModelKind::double_track;
    int horizon = 25;          ///< N shooting intervals
    double t_s = 0.1;          ///< sample time [s]
    CostWeights weights;
    VehicleParams vehicle;
    std::shared_ptr<const Road> road;
    std::vector<Obstacle> obstacles;
    double v_ref = 20.0;
    double lane_lower = -1.75;
    double lane_upper = 5.25;
    std::optional<double> a_y_max;    ///< lateral-acceleration cap [m/s^2]
    double y_e_buffer = 0.15;         ///< added to the ellipse lateral half axis [m]
    double collision_margin = 0.02;   ///< tightening of the ellipse residual
    double u_ca_max = 10.0;           ///< box on the slack-rate input [m/s]
    std::array<double, 3> u_prev{};   ///< applied input of the previous step

    void validate() const;
};

/// Dense shooting trajectory: N+1 node states and N interval controls.
struct Trajectory {
    int n_states = 0;
    std::vector<std::array<double, kMaxStates>> states;
    std::vector<std::array<double, kNumControls>> controls;

    static Trajectory zero(ModelKind kind, int horizon);
};

/// Warm-start shift: drop the first interval, duplicate the last entries.
Trajectory shift_warm_start(const Trajectory& previous, int horizon);

Eigen::VectorXd pack(const Trajectory& traj);
Trajectory unpack(const Eigen::VectorXd& z, ModelKind kind, int horizon);

/// Tracking + input-rate + input-magnitude + slip-penalty terms of one stage.
/// The slip penalty applies to the double-track model only and uses the
/// quasi-static loads at (state, input).
double stage_cost(std::span<const double> state, std::span<const double> input,
                  std::span<const double> prev_input, const OcpSpec& ocp);

/// Output-tracking term used at the terminal node.
double terminal_cost(std::span<const double> state, const OcpSpec& ocp);

/// Rolls the model forward from x0 with zero controls; defect-feasible by
/// construction, used as the cold-start guess.
Trajectory rollout_guess(const OcpSpec& ocp, std::span<const double> x0);

/// Multiple-shooting transcription with one RK4 step per interval. Decision
/// vector: node states then interval controls. Equalities: initial condition
/// and per-interval defects. Inequalities and variable boxes per the model's
/// constraint set. The returned evaluators own copies of everything except
/// the road, which is shared through the spec.
NlpProblem transcribe(const OcpSpec& ocp, std::span<const double> x0, const Trajectory& guess);

/// Names of the general-inequality rows, in row order (diagnostics).
std::vector<std::string> inequality_row_names(const OcpSpec& ocp);

}  // namespace ltmpc
