#include "ltmpc/eight_dof.hpp"

#include <cmath>
#include <stdexcept>

#include "ltmpc/tire.hpp"

namespace ltmpc {

double magic_formula_lateral(double alpha, double f_z, const VehicleParams& params) {
    if (f_z <= 1e-9) return 0.0;
    // shape/curvature factors; B chosen so that B*C*D reproduces C_alpha(F_z)
    constexpr double kShapeC = 1.45;
    constexpr double kCurvE = -0.2;
    const TireCoeffs c = tire_coeffs(f_z, params);
    const double d = c.peak_force;
    const double b = c.cornering_stiffness / (kShapeC * d);
    const double bx = b * alpha;
    return d * std::sin(kShapeC * std::atan(bx - kCurvE * (bx - std::atan(bx))));
}

EightDofState eight_dof_initial(const VehicleParams& params, double v0) {
    EightDofState x;
    x.v_x = v0;
    const double w = v0 / params.wheel_radius;
    x.omega_fl = x.omega_fr = x.omega_rl = x.omega_rr = w;
    return x;
}

EightDofState reference_8dof_dynamics(const EightDofState& x, const EightDofInput& u,
                                      const VehicleParams& p, const BodyAccel& lag,
                                      EightDofOutputs* outputs) {
    if (x.v_x <= 0.0) throw std::invalid_argument("8dof model needs v_x > 0");

    const double wb = p.wheelbase();
    const double cd = std::cos(u.delta);
    const double sd = std::sin(u.delta);

    // vertical loads from dynamic roll plus lagged accelerations
    const double m_front = p.K_phi_f * x.phi + p.m * p.l_r / wb * p.h_rc * lag.a_y;
    const double m_rear = p.K_phi_r * x.phi + p.m * p.l_f / wb * p.h_rc * lag.a_y;
    const double d_ff = m_front / p.t_f;
    const double d_fr = m_rear / p.t_r;
    const double stat_f = p.m * kGravity * p.l_r / (2.0 * wb) - p.m * p.h_cg / (2.0 * wb) * lag.a_x;
    const double stat_r = p.m * kGravity * p.l_f / (2.0 * wb) + p.m * p.h_cg / (2.0 * wb) * lag.a_x;
    VerticalForces<double> fz;
    fz.fr = stat_f + d_ff;
    fz.fl = stat_f - d_ff;
    fz.rr = stat_r + d_fr;
    fz.rl = stat_r - d_fr;
    fz.lift = fz.fr < 0.0 || fz.fl < 0.0 || fz.rr < 0.0 || fz.rl < 0.0;
    fz.fr = pos_part(fz.fr);
    fz.fl = pos_part(fz.fl);
    fz.rr = pos_part(fz.rr);
    fz.rl = pos_part(fz.rl);

    const SlipAngles<double> alpha = slip_angles_t(x.v_x, x.v_y, x.psi_dot, u.delta, p);
    const double fy_fl = magic_formula_lateral(alpha.fl, fz.fl, p);
    const double fy_fr = magic_formula_lateral(alpha.fr, fz.fr, p);
    const double fy_rl = magic_formula_lateral(alpha.rl, fz.rl, p);
    const double fy_rr = magic_formula_lateral(alpha.rr, fz.rr, p);

    // wheel-frame rolling speeds and slip ratios
    const double vy_f = x.v_y + p.l_f * x.psi_dot;
    const double u_fl = (x.v_x - 0.5 * p.t_f * x.psi_dot) * cd + vy_f * sd;
    const double u_fr = (x.v_x + 0.5 * p.t_f * x.psi_dot) * cd + vy_f * sd;
    const double u_rl = x.v_x - 0.5 * p.t_r * x.psi_dot;
    const double u_rr = x.v_x + 0.5 * p.t_r * x.psi_dot;
    const double r_e = p.wheel_radius;
    auto slip_ratio = [r_e](double omega, double u_roll) {
        return (r_e * omega - u_roll) / std::max(std::abs(u_roll), 0.5);
    };
    const double fx_fl = p.slip_stiffness * slip_ratio(x.omega_fl, u_fl);
    const double fx_fr = p.slip_stiffness * slip_ratio(x.omega_fr, u_fr);
    const double fx_rl = p.slip_stiffness * slip_ratio(x.omega_rl, u_rl);
    const double fx_rr = p.slip_stiffness * slip_ratio(x.omega_rr, u_rr);

    const double torque = u.f_x_total * r_e / 4.0;  // even drive split

    const double fx_front = fx_fl + fx_fr;
    const double fy_front = fy_fl + fy_fr;
    const double fx_rear = fx_rl + fx_rr;
    const double fy_rear = fy_rl + fy_rr;

    const double sum_fx = fx_front * cd - fy_front * sd + fx_rear;
    const double sum_fy = fy_front * cd + fx_front * sd + fy_rear;

    EightDofState dx;
    dx.v_x = sum_fx / p.m + x.v_y * x.psi_dot;
    dx.v_y = sum_fy / p.m - x.v_x * x.psi_dot;
    dx.psi_dot = (p.l_f * (fy_front * cd + fx_front * sd) - p.l_r * fy_rear +
                  0.5 * p.t_f * ((fx_fr - fx_fl) * cd + (fy_fl - fy_fr) * sd) +
                  0.5 * p.t_r * (fx_rr - fx_rl)) /
                 p.I_z;
    const double a_y_body = dx.v_y + x.v_x * x.psi_dot;
    dx.phi = x.phi_dot;
    dx.phi_dot = (p.m * (p.h_cg - p.h_rc) * (a_y_body + kGravity * x.phi) -
                  (p.K_phi_f + p.K_phi_r) * x.phi - p.c_roll * x.phi_dot) /
                 p.I_roll;
    dx.omega_fl = (torque - r_e * fx_fl) / p.wheel_inertia;
    dx.omega_fr = (torque - r_e * fx_fr) / p.wheel_inertia;
    dx.omega_rl = (torque - r_e * fx_rl) / p.wheel_inertia;
    dx.omega_rr = (torque - r_e * fx_rr) / p.wheel_inertia;

    if (outputs != nullptr) {
        outputs->f_z = fz;
        outputs->alpha = alpha;
        outputs->accel = BodyAccel{dx.v_x - x.v_y * x.psi_dot, a_y_body};
    }
    return dx;
}

namespace detail {

namespace {

EightDofState axpy(const EightDofState& a, double c, const EightDofState& b) {
    EightDofState out;
    out.v_x = a.v_x + c * b.v_x;
    out.v_y = a.v_y + c * b.v_y;
    out.psi_dot = a.psi_dot + c * b.psi_dot;
    out.phi = a.phi + c * b.phi;
    out.phi_dot = a.phi_dot + c * b.phi_dot;
    out.omega_fl = a.omega_fl + c * b.omega_fl;
    out.omega_fr = a.omega_fr + c * b.omega_fr;
    out.omega_rl = a.omega_rl + c * b.omega_rl;
    out.omega_rr = a.omega_rr + c * b.omega_rr;
    return out;
}

}  // namespace

EightDofState rk4_8dof(const EightDofState& x, const EightDofInput& u, const VehicleParams& p,
                       const BodyAccel& lag, double h, EightDofOutputs* first_eval) {
    const EightDofState k1 = reference_8dof_dynamics(x, u, p, lag, first_eval);
    const EightDofState k2 = reference_8dof_dynamics(axpy(x, 0.5 * h, k1), u, p, lag);
    const EightDofState k3 = reference_8dof_dynamics(axpy(x, 0.5 * h, k2), u, p, lag);
    const EightDofState k4 = reference_8dof_dynamics(axpy(x, h, k3), u, p, lag);
    EightDofState out = axpy(x, h / 6.0, k1);
    out = axpy(out, h / 3.0, k2);
    out = axpy(out, h / 3.0, k3);
    out = axpy(out, h / 6.0, k4);
    return out;
}

}  // namespace detail

}  // namespace ltmpc
