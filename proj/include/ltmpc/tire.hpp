#pragma once

#include "ltmpc/dual.hpp"
#include "ltmpc/vehicle_params.hpp"

namespace ltmpc {

/// Load-dependent tire coefficients of the piecewise lateral model.
struct TireCoeffs {
    double cornering_stiffness = 0.0;  ///< C_alpha(F_z) [N/rad]
    double peak_force = 0.0;           ///< F_peak(F_z) [N]
    double alpha_0 = 0.0;              ///< F_peak / C_alpha [rad]
};

inline TireCoeffs tire_coeffs(double f_z, const VehicleParams& p) {
    TireCoeffs c;
    if (f_z <= 0.0) return c;
    c.cornering_stiffness = p.c_a * f_z + p.c_b * f_z * f_z;
    c.peak_force = (0.9 - 0.182 * (f_z / p.F_z0 - 1.0)) * p.mu * f_z;
    c.alpha_0 = c.peak_force / c.cornering_stiffness;
    return c;
}

/// Piecewise lateral tire force: linear up to 0.85*alpha_0, a reduced-slope
/// transition up to 1.75*alpha_0, then saturated at the peak force.
/// Odd in alpha; zero load gives zero force.
template <class S>
S tire_lateral_force(const S& alpha, const S& f_z, const VehicleParams& p) {
    using std::abs;
    if (value_of(f_z) <= 1e-12) return S(0.0) * alpha;  // keeps derivative bookkeeping
    const S c_alpha = S(p.c_a) * f_z + S(p.c_b) * f_z * f_z;
    const S f_peak = (S(0.9) - S(0.182) * (f_z / S(p.F_z0) - S(1.0))) * S(p.mu) * f_z;
    const S alpha0 = f_peak / c_alpha;
    const S mag = abs(alpha);
    const double sign = value_of(alpha) < 0.0 ? -1.0 : 1.0;
    if (value_of(mag) <= 0.85 * value_of(alpha0)) {
        return c_alpha * alpha;
    }
    if (value_of(mag) < 1.75 * value_of(alpha0)) {
        return c_alpha / S(6.0) * (mag + S(4.25) * alpha0) * S(sign);
    }
    return f_peak * S(sign);
}

inline double tire_lateral_force(double alpha, double f_z, const VehicleParams& p) {
    return tire_lateral_force<double>(alpha, f_z, p);
}

}  // namespace ltmpc
