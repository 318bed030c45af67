#include "ltmpc/vehicle_params.hpp"

#include <sstream>

namespace ltmpc {

namespace {

void require(bool ok, std::ostringstream& msg, const char* what) {
    if (!ok) {
        if (msg.tellp() > 0) msg << "; ";
        msg << what;
    }
}

}  // namespace

bool VehicleParams::is_valid(std::string* why) const {
    std::ostringstream msg;
    require(m > 0.0, msg, "m must be positive");
    require(I_z > 0.0, msg, "I_z must be positive");
    require(l_f > 0.0, msg, "l_f must be positive");
    require(l_r > 0.0, msg, "l_r must be positive");
    require(t_f > 0.0, msg, "t_f must be positive");
    require(t_r > 0.0, msg, "t_r must be positive");
    require(h_cg > 0.0, msg, "h_cg must be positive");
    require(F_z0 > 0.0, msg, "F_z0 must be positive");
    require(mu > 0.0, msg, "mu must be positive");
    require(P_max > 0.0, msg, "P_max must be positive");
    require(h_rc < h_cg, msg, "h_rc must be below h_cg");
    // roll-angle denominator must stay positive or the static roll response diverges
    require(K_phi_f + K_phi_r > m * kGravity * (h_cg - h_rc), msg,
            "roll stiffness too low for CG height (K_phi_f + K_phi_r <= m*g*(h_cg - h_rc))");
    require(delta_min < delta_max, msg, "steering bounds inverted");
    require(ddelta_min < ddelta_max, msg, "steering-rate bounds inverted");
    const bool ok = msg.tellp() == 0;
    if (!ok && why != nullptr) *why = msg.str();
    return ok;
}

void VehicleParams::validate() const {
    std::string why;
    if (!is_valid(&why)) throw std::invalid_argument("invalid vehicle parameters: " + why);
}

}  // namespace ltmpc
