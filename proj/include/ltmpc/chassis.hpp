#pragma once

#include <stdexcept>

#include "ltmpc/dual.hpp"
#include "ltmpc/tire.hpp"
#include "ltmpc/vehicle_params.hpp"

namespace ltmpc {

/// Body-frame accelerations used by the quasi-static load formulas.
struct BodyAccel {
    double a_x = 0.0;
    double a_y = 0.0;
};

/// Steady-state roll angle: phi = m*(h_cg - h_rc)*a_y / (K_phi - m*g*(h_cg - h_rc)).
template <class S>
S roll_angle_t(const S& a_y, const VehicleParams& p) {
    const double arm = p.h_cg - p.h_rc;
    const double den = p.K_phi_f + p.K_phi_r - p.m * kGravity * arm;
    return S(p.m * arm / den) * a_y;
}

inline double roll_angle(double a_y, const VehicleParams& p) {
    p.validate();
    return roll_angle_t<double>(a_y, p);
}

template <class S>
struct AxleLoadTransfer {
    S front;  ///< dF_zf [N]
    S rear;   ///< dF_zr [N]
};

/// Steady-state lateral load transfer per axle from the roll moments
/// M_phi,i = K_phi,i*phi + (axle mass share)*h_rc*a_y, divided by the track.
template <class S>
AxleLoadTransfer<S> lateral_load_transfer_t(const S& a_y, const VehicleParams& p) {
    const S phi = roll_angle_t(a_y, p);
    const double wb = p.wheelbase();
    const S m_front = S(p.K_phi_f) * phi + S(p.m * p.l_r / wb * p.h_rc) * a_y;
    const S m_rear = S(p.K_phi_r) * phi + S(p.m * p.l_f / wb * p.h_rc) * a_y;
    return {m_front / S(p.t_f), m_rear / S(p.t_r)};
}

inline AxleLoadTransfer<double> lateral_load_transfer(double a_y, const VehicleParams& p) {
    return lateral_load_transfer_t<double>(a_y, p);
}

/// Per-wheel vertical loads. `*_raw` values are the unclamped sums (they add
/// up to m*g exactly); the main fields are clamped at zero for wheel lift.
template <class S>
struct VerticalForces {
    S fr, fl, rr, rl;
    bool lift = false;  ///< true when any unclamped load went negative
};

/// Static axle split plus longitudinal a_x shift plus lateral transfer.
/// Positive a_y loads the right-hand wheels.
template <class S>
VerticalForces<S> vertical_forces_t(const S& a_x, const S& a_y, const VehicleParams& p) {
    const double wb = p.wheelbase();
    const auto lt = lateral_load_transfer_t(a_y, p);
    const S stat_f = S(p.m * kGravity * p.l_r / (2.0 * wb)) - S(p.m * p.h_cg / (2.0 * wb)) * a_x;
    const S stat_r = S(p.m * kGravity * p.l_f / (2.0 * wb)) + S(p.m * p.h_cg / (2.0 * wb)) * a_x;
    VerticalForces<S> out;
    out.fr = stat_f + lt.front;
    out.fl = stat_f - lt.front;
    out.rr = stat_r + lt.rear;
    out.rl = stat_r - lt.rear;
    out.lift = value_of(out.fr) < 0.0 || value_of(out.fl) < 0.0 || value_of(out.rr) < 0.0 ||
               value_of(out.rl) < 0.0;
    if (out.lift) {
        out.fr = pos_part(out.fr);
        out.fl = pos_part(out.fl);
        out.rr = pos_part(out.rr);
        out.rl = pos_part(out.rl);
    }
    return out;
}

inline VerticalForces<double> vertical_forces(double a_x, double a_y, const VehicleParams& p) {
    return vertical_forces_t<double>(a_x, a_y, p);
}

template <class S>
struct SlipAngles {
    S fl, fr, rl, rr;
};

/// Double-track slip angles from the per-wheel contact velocities.
/// Left wheels take the minus sign in the longitudinal channel.
template <class S>
SlipAngles<S> slip_angles_t(const S& v_x, const S& v_y, const S& yaw_rate, const S& delta,
                            const VehicleParams& p) {
    using std::atan2;
    SlipAngles<S> out;
    const S vyf = v_y + S(p.l_f) * yaw_rate;
    const S vyr = v_y - S(p.l_r) * yaw_rate;
    out.fl = delta - atan2(vyf, v_x - S(0.5 * p.t_f) * yaw_rate);
    out.fr = delta - atan2(vyf, v_x + S(0.5 * p.t_f) * yaw_rate);
    out.rl = -atan2(vyr, v_x - S(0.5 * p.t_r) * yaw_rate);
    out.rr = -atan2(vyr, v_x + S(0.5 * p.t_r) * yaw_rate);
    return out;
}

inline SlipAngles<double> slip_angles(double v_x, double v_y, double yaw_rate, double delta,
                                      const VehicleParams& p) {
    if (v_x <= 0.0) throw std::invalid_argument("slip_angles requires v_x > 0");
    return slip_angles_t<double>(v_x, v_y, yaw_rate, delta, p);
}

}  // namespace ltmpc
