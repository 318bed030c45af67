#pragma once

#include <cmath>
#include <stdexcept>

#include "ltmpc/dual.hpp"

namespace ltmpc {

/// One traffic object in Frenet coordinates with constant tangential and
/// normal accelerations over the prediction horizon.
struct Obstacle {
    double s_0 = 0.0;          ///< initial arc position [m]
    double y_e0 = 0.0;         ///< initial lateral offset [m]
    double v_t = 0.0;          ///< tangential speed [m/s]
    double v_n = 0.0;          ///< normal speed [m/s]
    double a_t = 0.0;          ///< tangential acceleration [m/s^2]
    double a_n = 0.0;          ///< normal acceleration [m/s^2]
    double half_length = 2.5;  ///< footprint half length [m]
    double half_width = 1.0;   ///< footprint half width [m]

    void validate() const {
        if (half_length <= 0.0 || half_width <= 0.0) {
            throw std::invalid_argument("obstacle half axes must be positive");
        }
    }
};

template <class S>
struct ObstaclePosition {
    S s;
    S y_e;
};

/// Constant-acceleration prediction of the obstacle at elapsed time x_t.
template <class S>
ObstaclePosition<S> propagate_obstacle_t(const Obstacle& ob, const S& x_t) {
    return {S(ob.s_0) + S(ob.v_t) * x_t + S(0.5 * ob.a_t) * x_t * x_t,
            S(ob.y_e0) + S(ob.v_n) * x_t + S(0.5 * ob.a_n) * x_t * x_t};
}

inline ObstaclePosition<double> propagate_obstacle(const Obstacle& ob, double x_t) {
    if (x_t < 0.0) throw std::invalid_argument("propagate_obstacle needs x_t >= 0");
    return propagate_obstacle_t<double>(ob, x_t);
}

/// Ellipse-norm collision residual, feasible when >= 0. The footprint half
/// axes are inflated to sqrt(2) times their size, the lateral axis widened
/// by `y_e_buffer`, and the slack zeta stretches the longitudinal axis by
/// T_s * zeta.
template <class S>
S collision_residual_t(const S& s, const S& y_e, const S& zeta_ca, const Obstacle& ob, const S& x_t,
                       double t_s, double y_e_buffer) {
    const auto pos = propagate_obstacle_t(ob, x_t);
    const double dl_ss = std::sqrt(2.0 * ob.half_length * ob.half_length);
    const double dw = std::sqrt(2.0 * ob.half_width * ob.half_width) + y_e_buffer;
    const S dl = S(dl_ss) + S(t_s) * zeta_ca;
    const S ey = (y_e - pos.y_e) / S(dw);
    const S es = (s - pos.s) / dl;
    return ey * ey + es * es - S(1.0);
}

inline double collision_residual(double s, double y_e, double zeta_ca, const Obstacle& ob,
                                 double x_t, double t_s, double y_e_buffer) {
    if (zeta_ca < 0.0) throw std::invalid_argument("collision_residual needs zeta_ca >= 0");
    return collision_residual_t<double>(s, y_e, zeta_ca, ob, x_t, t_s, y_e_buffer);
}

}  // namespace ltmpc
