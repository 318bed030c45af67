#include "ltmpc/road.hpp"

#include <algorithm>
#include <cmath>

namespace ltmpc {

double Profile::operator()(double at) const {
    if (s.empty()) return fallback;
    if (at <= s.front()) return value.front();
    if (at >= s.back()) return value.back();
    std::size_t hi = 1;
    while (s[hi] < at) ++hi;
    const double t = (at - s[hi - 1]) / (s[hi] - s[hi - 1]);
    return value[hi - 1] + t * (value[hi] - value[hi - 1]);
}

Road::Road(Profile curvature, Profile lane_lower, Profile lane_upper, Profile reference_speed,
           double length)
    : kappa_(std::move(curvature)),
      lane_lower_(std::move(lane_lower)),
      lane_upper_(std::move(lane_upper)),
      v_ref_(std::move(reference_speed)),
      length_(length) {
    if (length_ <= 0.0) throw std::invalid_argument("road length must be positive");
    build_centerline_table();
}

Road Road::straight(double length, double lane_lower, double lane_upper, double v_ref) {
    return constant_curvature(0.0, length, lane_lower, lane_upper, v_ref);
}

Road Road::constant_curvature(double kappa, double length, double lane_lower, double lane_upper,
                              double v_ref) {
    Profile k;
    k.fallback = kappa;
    Profile lo;
    lo.fallback = lane_lower;
    Profile up;
    up.fallback = lane_upper;
    Profile vr;
    vr.fallback = v_ref;
    return Road(std::move(k), std::move(lo), std::move(up), std::move(vr), length);
}

namespace {

// pose ODE along arc length: x' = cos(psi), y' = sin(psi), psi' = kappa(s)
GlobalPose rk4_pose(const Road& road, const GlobalPose& p, double s0, double h) {
    auto f = [&road](double s, const GlobalPose& q) {
        return GlobalPose{std::cos(q.psi), std::sin(q.psi), road.curvature<double>(s)};
    };
    auto axpy = [](const GlobalPose& a, double c, const GlobalPose& b) {
        return GlobalPose{a.x + c * b.x, a.y + c * b.y, a.psi + c * b.psi};
    };
    const GlobalPose k1 = f(s0, p);
    const GlobalPose k2 = f(s0 + 0.5 * h, axpy(p, 0.5 * h, k1));
    const GlobalPose k3 = f(s0 + 0.5 * h, axpy(p, 0.5 * h, k2));
    const GlobalPose k4 = f(s0 + h, axpy(p, h, k3));
    return GlobalPose{p.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                      p.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                      p.psi + h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi)};
}

}  // namespace

void Road::build_centerline_table() {
    const std::size_t n = static_cast<std::size_t>(std::ceil(length_ / table_ds_)) + 1;
    table_.clear();
    table_.reserve(n);
    GlobalPose p{};
    table_.push_back(p);
    for (std::size_t i = 1; i < n; ++i) {
        const double s0 = static_cast<double>(i - 1) * table_ds_;
        const double h = std::min(table_ds_, length_ - s0);
        if (h <= 0.0) break;
        p = rk4_pose(*this, p, s0, h);
        table_.push_back(p);
    }
}

GlobalPose Road::centerline_pose(double s) const {
    const double sc = std::clamp(s, 0.0, length_);
    const std::size_t idx =
        std::min(static_cast<std::size_t>(sc / table_ds_), table_.size() - 1);
    const double s0 = static_cast<double>(idx) * table_ds_;
    GlobalPose p = table_[idx];
    const double rem = sc - s0;
    if (rem > 1e-12) p = rk4_pose(*this, p, s0, rem);
    return p;
}

GlobalPose Road::frenet_to_global(double s, double y_e, double psi_e) const {
    if (s < -1e-9 || s > length_ + 1e-9) {
        throw std::out_of_range("frenet_to_global: s outside road extent");
    }
    const GlobalPose c = centerline_pose(s);
    return GlobalPose{c.x - y_e * std::sin(c.psi), c.y + y_e * std::cos(c.psi), c.psi + psi_e};
}

}  // namespace ltmpc
