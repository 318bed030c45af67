#pragma once

#include <array>
#include <vector>

#include "ltmpc/chassis.hpp"
#include "ltmpc/vehicle_params.hpp"

namespace ltmpc {

/// Reference model state: planar body motion, a roll degree of freedom and
/// four wheel-spin states.
struct EightDofState {
    double v_x = 0.0;
    double v_y = 0.0;
    double psi_dot = 0.0;
    double phi = 0.0;      ///< roll angle [rad]
    double phi_dot = 0.0;  ///< roll rate [rad/s]
    double omega_fl = 0.0, omega_fr = 0.0, omega_rl = 0.0, omega_rr = 0.0;
};

struct EightDofInput {
    double delta = 0.0;      ///< front steering [rad]
    double f_x_total = 0.0;  ///< total demanded longitudinal force [N]
};

struct EightDofOutputs {
    VerticalForces<double> f_z;
    SlipAngles<double> alpha;
    BodyAccel accel;  ///< body-frame accelerations at this evaluation
};

/// Continuous-time derivatives of the reference model. Lateral tire forces
/// use a Magic Formula whose small-slip slope equals the quadratic cornering
/// stiffness fit, and whose peak matches the piecewise planner tire; the
/// wheel-spin states drive longitudinal force through a linear slip-ratio
/// stiffness. Vertical loads react to the dynamic roll angle and to the
/// lagged body accelerations.
EightDofState reference_8dof_dynamics(const EightDofState& state, const EightDofInput& input,
                                      const VehicleParams& params, const BodyAccel& lagged_accel,
                                      EightDofOutputs* outputs = nullptr);

/// Magic Formula lateral force used by the reference model.
double magic_formula_lateral(double alpha, double f_z, const VehicleParams& params);

/// Sampled trajectory of a fixed-step reference-model run.
struct EightDofTrace {
    std::vector<double> time;
    std::vector<EightDofState> state;
    std::vector<EightDofOutputs> outputs;
};

/// Integrates the reference model with RK4 at step `h`, updating the lagged
/// accelerations once per step. `steer(t)` supplies the steering input.
template <class SteerFn>
EightDofTrace simulate_8dof(const VehicleParams& params, double v0, double duration, double h,
                            SteerFn&& steer, double f_x_total = 0.0);

EightDofState eight_dof_initial(const VehicleParams& params, double v0);

namespace detail {
EightDofState rk4_8dof(const EightDofState& x, const EightDofInput& u, const VehicleParams& p,
                       const BodyAccel& lag, double h, EightDofOutputs* first_eval);
}

template <class SteerFn>
EightDofTrace simulate_8dof(const VehicleParams& params, double v0, double duration, double h,
                            SteerFn&& steer, double f_x_total) {
    EightDofTrace trace;
    EightDofState x = eight_dof_initial(params, v0);
    BodyAccel lag{};
    const int n = static_cast<int>(duration / h);
    trace.time.reserve(static_cast<std::size_t>(n));
    trace.state.reserve(static_cast<std::size_t>(n));
    trace.outputs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = i * h;
        const EightDofInput u{steer(t), f_x_total};
        EightDofOutputs outs;
        const EightDofState next = detail::rk4_8dof(x, u, params, lag, h, &outs);
        trace.time.push_back(t);
        trace.state.push_back(x);
        trace.outputs.push_back(outs);
        lag = outs.accel;
        x = next;
    }
    return trace;
}

}  // namespace ltmpc
