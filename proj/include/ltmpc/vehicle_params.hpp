#pragma once

#include <stdexcept>
#include <string>

#include <limits>

namespace ltmpc {

inline constexpr double kGravity = 9.81;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Physical constants of one vehicle, SI units throughout.
///
/// The defaults describe a representative large SUV. They are configuration
/// defaults chosen to give plausible handling behavior; load a JSON file to
/// override any subset (keys match the field names exactly).
struct VehicleParams {
    double m = 2300.0;       ///< mass [kg]
    double I_z = 4400.0;     ///< yaw inertia [kg m^2]
    double l_f = 1.35;       ///< CG to front axle [m]
    double l_r = 1.55;       ///< CG to rear axle [m]
    double t_f = 1.65;       ///< front track width [m]
    double t_r = 1.65;       ///< rear track width [m]
    double h_cg = 0.75;      ///< CG height [m]
    double h_rc = 0.12;      ///< roll-center height [m]
    double K_phi_f = 90000.0;  ///< front roll stiffness [N m/rad]
    double K_phi_r = 70000.0;  ///< rear roll stiffness [N m/rad]
    double mu = 0.9;         ///< road friction coefficient [-]
    double F_z0 = 5600.0;    ///< nominal tire load [N]
    double c_a = 16.0;       ///< cornering stiffness linear coefficient [1/rad]
    double c_b = -1.0e-3;    ///< cornering stiffness quadratic coefficient [1/(N rad)]
    double P_max = 300.0e3;  ///< maximum engine power [W]
    double delta_min = -0.6;   ///< steering lower bound [rad]
    double delta_max = 0.6;    ///< steering upper bound [rad]
    double ddelta_min = -0.8;  ///< steering rate lower bound [rad/s]
    double ddelta_max = 0.8;   ///< steering rate upper bound [rad/s]

    // reference model only
    double I_roll = 900.0;     ///< roll inertia [kg m^2]
    double c_roll = 12000.0;   ///< roll damping [N m s/rad]
    double wheel_radius = 0.38;      ///< effective rolling radius [m]
    double wheel_inertia = 1.8;      ///< spin inertia per wheel [kg m^2]
    double slip_stiffness = 9.0e4;   ///< longitudinal force per unit slip ratio [N]

    double wheelbase() const { return l_f + l_r; }
    double weight() const { return m * kGravity; }

    /// Throws std::invalid_argument when any structural invariant fails.
    void validate() const;

    /// validate() as a predicate, with the failure message on request.
    bool is_valid(std::string* why = nullptr) const;

    /// Copy with CG height scaled by `factor` (loaded / unloaded variants).
    VehicleParams with_hcg_scale(double factor) const {
        VehicleParams out = *this;
        out.h_cg *= factor;
        return out;
    }
};

}  // namespace ltmpc
