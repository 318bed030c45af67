#include "ltmpc/models.hpp"

namespace ltmpc {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::particle: return "particle";
        case ModelKind::kinematic: return "kinematic";
        case ModelKind::double_track: return "doubletrack";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "particle") return ModelKind::particle;
    if (name == "kinematic") return ModelKind::kinematic;
    if (name == "doubletrack" || name == "double_track") return ModelKind::double_track;
    throw std::invalid_argument("unknown planner model: " + name);
}

TireState tire_state_at(const DoubleTrackState& state, double delta, const BodyAccel& accel,
                        const VehicleParams& params) {
    TireState t;
    t.alpha = slip_angles(state.v_x, state.v_y, state.psi_dot, delta, params);
    t.f_z = vertical_forces(accel.a_x, accel.a_y, params);
    const auto lt = lateral_load_transfer(accel.a_y, params);
    t.df_zf = lt.front;
    t.df_zr = lt.rear;
    t.f_yfl = tire_lateral_force(t.alpha.fl, t.f_z.fl, params);
    t.f_yfr = tire_lateral_force(t.alpha.fr, t.f_z.fr, params);
    t.f_yrl = tire_lateral_force(t.alpha.rl, t.f_z.rl, params);
    t.f_yrr = tire_lateral_force(t.alpha.rr, t.f_z.rr, params);
    return t;
}

namespace {

void check_frenet(double y_e, double kappa) {
    if (1.0 - y_e * kappa <= 0.0) {
        throw std::invalid_argument("frenet singularity: y_e*kappa >= 1");
    }
}

}  // namespace

ParticleState particle_dynamics(const ParticleState& state, const std::array<double, 3>& input,
                                double kappa) {
    check_frenet(state.y_e, kappa);
    ModelContext ctx{ModelKind::particle, VehicleParams{}, nullptr, kappa, 0.1, std::nullopt};
    const auto x = to_array(state);
    std::array<double, kMaxStates> dx{};
    particle_rhs<double>(ctx, std::span<const double>(x.data(), 6), input, dx);
    return particle_from_array(dx);
}

KinematicState kinematic_dynamics(const KinematicState& state, const std::array<double, 3>& input,
                                  double kappa, const VehicleParams& params, double yaw_lag) {
    check_frenet(state.y_e, kappa);
    if (std::abs(state.delta) >= 1.5707) {
        throw std::invalid_argument("kinematic model needs |delta| < pi/2");
    }
    ModelContext ctx{ModelKind::kinematic, params, nullptr, kappa, yaw_lag, std::nullopt};
    const auto x = to_array(state);
    std::array<double, kMaxStates> dx{};
    kinematic_rhs<double>(ctx, std::span<const double>(x.data(), 9), input, dx);
    return kinematic_from_array(dx);
}

DoubleTrackState double_track_dynamics(const DoubleTrackState& state,
                                       const std::array<double, 3>& input, double kappa,
                                       const VehicleParams& params,
                                       const BodyAccel& lagged_accel) {
    if (state.v_x <= 0.0) throw std::invalid_argument("double-track model needs v_x > 0");
    check_frenet(state.y_e, kappa);
    ModelContext ctx{ModelKind::double_track, params, nullptr, kappa, 0.1, lagged_accel};
    const auto x = to_array(state);
    std::array<double, kMaxStates> dx{};
    double_track_rhs<double>(ctx, std::span<const double>(x.data(), 8), input, dx);
    return double_track_from_array(dx);
}

std::array<double, kMaxStates> to_array(const ParticleState& s) {
    return {s.v_t, s.psi_e, s.y_e, s.s, s.x_t, s.zeta_ca, 0.0, 0.0, 0.0};
}
std::array<double, kMaxStates> to_array(const KinematicState& s) {
    return {s.v, s.psi_e, s.y_e, s.s, s.x_t, s.beta, s.delta, s.psi_dot, s.zeta_ca};
}
std::array<double, kMaxStates> to_array(const DoubleTrackState& s) {
    return {s.v_x, s.v_y, s.psi_dot, s.psi_e, s.y_e, s.s, s.x_t, s.zeta_ca, 0.0};
}

ParticleState particle_from_array(std::span<const double> x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5]};
}
KinematicState kinematic_from_array(std::span<const double> x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8]};
}
DoubleTrackState double_track_from_array(std::span<const double> x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]};
}

}  // namespace ltmpc
