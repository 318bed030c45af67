#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "ltmpc/chassis.hpp"
#include "ltmpc/road.hpp"
#include "ltmpc/tire.hpp"
#include "ltmpc/vehicle_params.hpp"

namespace ltmpc {

enum class ModelKind { particle, kinematic, double_track };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

inline constexpr int kMaxStates = 9;
inline constexpr int kNumControls = 3;

constexpr int state_dim(ModelKind kind) {
    switch (kind) {
        case ModelKind::particle: return 6;
        case ModelKind::kinematic: return 9;
        case ModelKind::double_track: return 8;
    }
    return 0;
}

/// Index of each named channel inside a model's state vector (-1 if absent).
struct StateLayout {
    int speed;     ///< v_t / v / v_x
    int psi_e;
    int y_e;
    int s;
    int x_t;
    int zeta;
    int beta;      ///< kinematic only
    int delta;     ///< kinematic only (steering is a state there)
    int yaw_rate;  ///< kinematic and double-track
    int v_y;       ///< double-track only
};

constexpr StateLayout state_layout(ModelKind kind) {
    switch (kind) {
        case ModelKind::particle:
            return {0, 1, 2, 3, 4, 5, -1, -1, -1, -1};
        case ModelKind::kinematic:
            return {0, 1, 2, 3, 4, 8, 5, 6, 7, -1};
        case ModelKind::double_track:
            return {0, 3, 4, 5, 6, 7, -1, -1, 2, 1};
    }
    return {};
}

// control vector layouts (all models use 3 inputs, u[2] is always u_CA):
//   particle:     [a_t, psi_dot_p, u_CA]
//   kinematic:    [A, delta_rate, u_CA]
//   double-track: [delta, F_X, u_CA]

struct ParticleState {
    double v_t = 0.0, psi_e = 0.0, y_e = 0.0, s = 0.0, x_t = 0.0, zeta_ca = 0.0;
};
struct KinematicState {
    double v = 0.0, psi_e = 0.0, y_e = 0.0, s = 0.0, x_t = 0.0;
    double beta = 0.0, delta = 0.0, psi_dot = 0.0, zeta_ca = 0.0;
};
struct DoubleTrackState {
    double v_x = 0.0, v_y = 0.0, psi_dot = 0.0, psi_e = 0.0, y_e = 0.0, s = 0.0, x_t = 0.0,
           zeta_ca = 0.0;
};

/// Everything a model right-hand side needs besides state and control.
/// `lagged_accel` feeds the double-track load formulas during plant
/// integration; without it the loads use the quasi-static estimate
/// a_x = F_X/m, a_y = v_x*psi_dot computed from the evaluation point itself.
struct ModelContext {
    ModelKind kind = ModelKind::particle;
    VehicleParams params;
    const Road* road = nullptr;  ///< curvature source; fixed_kappa applies when null
    double fixed_kappa = 0.0;
    double yaw_lag = 0.1;        ///< kinematic yaw-rate lag time constant [s]
    std::optional<BodyAccel> lagged_accel;
};

template <class S>
S road_curvature(const ModelContext& ctx, const S& s) {
    if (ctx.road == nullptr) return S(ctx.fixed_kappa);
    return ctx.road->curvature(s);
}

// Eq-style particle rows: inputs are tangential acceleration and yaw rate.
template <class S>
void particle_rhs(const ModelContext& ctx, std::span<const S> x, std::span<const S> u,
                  std::span<S> dx) {
    using std::cos;
    using std::sin;
    const S& v_t = x[0];
    const S& psi_e = x[1];
    const S& y_e = x[2];
    const S kappa = road_curvature(ctx, x[3]);
    const S denom = S(1.0) - y_e * kappa;
    dx[0] = u[0];
    dx[1] = u[1] - v_t * cos(psi_e) * kappa / denom;
    dx[2] = v_t * sin(psi_e);
    dx[3] = v_t * cos(psi_e) / denom;
    dx[4] = S(1.0);
    dx[5] = u[2];
}

// Kinematic bicycle with beta, delta and yaw rate carried as states; the yaw
// rate relaxes to the Ackermann value with time constant ctx.yaw_lag.
template <class S>
void kinematic_rhs(const ModelContext& ctx, std::span<const S> x, std::span<const S> u,
                   std::span<S> dx) {
    using std::cos;
    using std::sin;
    using std::tan;
    const VehicleParams& p = ctx.params;
    const double wb = p.wheelbase();
    const S& v = x[0];
    const S& psi_e = x[1];
    const S& y_e = x[2];
    const S& beta = x[5];
    const S& delta = x[6];
    const S& psi_dot = x[7];
    const S kappa = road_curvature(ctx, x[3]);
    const S denom = S(1.0) - y_e * kappa;
    const S cos_b = cos(beta);
    const S tan_d = tan(delta);
    const S cos_d = cos(delta);
    const S sec2 = S(1.0) / (cos_d * cos_d);
    const S vpath = v * cos_b;

    dx[0] = u[0];
    dx[1] = psi_dot - vpath * cos(psi_e) * kappa / denom;
    dx[2] = vpath * sin(psi_e);
    dx[3] = vpath * cos(psi_e) / denom;
    dx[4] = S(1.0);
    // beta = atan(l_r*tan(delta)/L) differentiated through delta_rate
    dx[5] = S(p.l_r * wb) * sec2 / (S(wb * wb) + S(p.l_r * p.l_r) * tan_d * tan_d) * u[1];
    dx[6] = u[1];
    dx[7] = (v * tan_d * cos_b / S(wb) - psi_dot) / S(ctx.yaw_lag);
    dx[8] = u[2];
}

/// Per-wheel tire quantities at one double-track evaluation point.
struct TireState {
    SlipAngles<double> alpha;
    VerticalForces<double> f_z;
    double f_yfl = 0.0, f_yfr = 0.0, f_yrl = 0.0, f_yrr = 0.0;
    double df_zf = 0.0, df_zr = 0.0;  ///< axle load transfers used
};

// Double-track planner rows; loads come from the lagged accelerations when
// the context provides them, otherwise from the quasi-static estimate.
template <class S>
void double_track_rhs(const ModelContext& ctx, std::span<const S> x, std::span<const S> u,
                      std::span<S> dx) {
    using std::cos;
    using std::sin;
    const VehicleParams& p = ctx.params;
    const S& v_x = x[0];
    const S& v_y = x[1];
    const S& yaw_rate = x[2];
    const S& psi_e = x[3];
    const S& y_e = x[4];
    const S& delta = u[0];
    const S& f_x_total = u[1];
    const S kappa = road_curvature(ctx, x[5]);
    const S denom = S(1.0) - y_e * kappa;
    const double mg = p.weight();

    S a_x, a_y;
    if (ctx.lagged_accel.has_value()) {
        a_x = S(ctx.lagged_accel->a_x);
        a_y = S(ctx.lagged_accel->a_y);
    } else {
        a_x = f_x_total / S(p.m);
        a_y = v_x * yaw_rate;
    }
    const auto fz = vertical_forces_t(a_x, a_y, p);
    const S fz_front = fz.fl + fz.fr;
    const S fz_rear = fz.rl + fz.rr;

    const auto alpha = slip_angles_t(v_x, v_y, yaw_rate, delta, p);
    const S f_yfl = tire_lateral_force(alpha.fl, fz.fl, p);
    const S f_yfr = tire_lateral_force(alpha.fr, fz.fr, p);
    const S f_yrl = tire_lateral_force(alpha.rl, fz.rl, p);
    const S f_yrr = tire_lateral_force(alpha.rr, fz.rr, p);

    const S fx_front = f_x_total * fz_front / S(mg);
    const S fx_rear = f_x_total * fz_rear / S(mg);
    const S cos_d = cos(delta);
    const S sin_d = sin(delta);

    dx[0] = (fx_front * cos_d + fx_rear - (f_yfr + f_yfl) * sin_d) / S(p.m) + v_y * yaw_rate;
    dx[1] = (fx_front * sin_d + f_yrr + f_yrl + (f_yfr + f_yfl) * cos_d) / S(p.m) - v_x * yaw_rate;
    dx[2] = ((f_yfr + f_yfl) * S(p.l_f) * cos_d + (f_yfl - f_yfr) * S(0.5 * p.t_f) * sin_d -
             (f_yrr + f_yrl) * S(p.l_r)) /
            S(p.I_z);
    dx[3] = yaw_rate - (v_x * cos(psi_e) - v_y * sin(psi_e)) * kappa / denom;
    dx[4] = v_x * sin(psi_e) + v_y * cos(psi_e);
    dx[5] = (v_x * cos(psi_e) - v_y * sin(psi_e)) / denom;
    dx[6] = S(1.0);
    dx[7] = u[2];
}

template <class S>
void model_rhs(const ModelContext& ctx, std::span<const S> x, std::span<const S> u,
               std::span<S> dx) {
    switch (ctx.kind) {
        case ModelKind::particle: particle_rhs(ctx, x, u, dx); return;
        case ModelKind::kinematic: kinematic_rhs(ctx, x, u, dx); return;
        case ModelKind::double_track: double_track_rhs(ctx, x, u, dx); return;
    }
    throw std::logic_error("unknown model kind");
}

/// Tire quantities for logging and the slip-angle cost, evaluated at one
/// double-track point with explicit load accelerations.
TireState tire_state_at(const DoubleTrackState& state, double delta, const BodyAccel& accel,
                        const VehicleParams& params);

// typed wrappers over the span interfaces; these check the documented
// preconditions and are the API unit tests exercise

ParticleState particle_dynamics(const ParticleState& state, const std::array<double, 3>& input,
                                double kappa);
KinematicState kinematic_dynamics(const KinematicState& state, const std::array<double, 3>& input,
                                  double kappa, const VehicleParams& params, double yaw_lag);
DoubleTrackState double_track_dynamics(const DoubleTrackState& state,
                                       const std::array<double, 3>& input, double kappa,
                                       const VehicleParams& params, const BodyAccel& lagged_accel);

std::array<double, kMaxStates> to_array(const ParticleState& s);
std::array<double, kMaxStates> to_array(const KinematicState& s);
std::array<double, kMaxStates> to_array(const DoubleTrackState& s);
ParticleState particle_from_array(std::span<const double> x);
KinematicState kinematic_from_array(std::span<const double> x);
DoubleTrackState double_track_from_array(std::span<const double> x);

}  // namespace ltmpc
