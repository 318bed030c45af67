#pragma once

#include <stdexcept>
#include <vector>

#include "ltmpc/dual.hpp"

namespace ltmpc {

/// Piecewise-linear profile over arc length; constant extrapolation outside
/// the breakpoints. An empty table evaluates to `fallback`.
struct Profile {
    std::vector<double> s;
    std::vector<double> value;
    double fallback = 0.0;

    double operator()(double at) const;
};

struct GlobalPose {
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;
};

/// Reference centerline plus lane corridor and speed profile, all keyed on
/// arc length s. Curvature is evaluated with dual-number support so the
/// dynamics stay differentiable on curved roads.
class Road {
public:
    Road() = default;
    Road(Profile curvature, Profile lane_lower, Profile lane_upper, Profile reference_speed,
         double length);

    static Road straight(double length, double lane_lower, double lane_upper, double v_ref);
    static Road constant_curvature(double kappa, double length, double lane_lower,
                                   double lane_upper, double v_ref);

    double length() const { return length_; }
    double lane_lower(double s) const { return lane_lower_(s); }
    double lane_upper(double s) const { return lane_upper_(s); }
    double reference_speed(double s) const { return v_ref_(s); }

    template <class S>
    S curvature(const S& s) const {
        const auto& xs = kappa_.s;
        const auto& ys = kappa_.value;
        if (xs.empty()) return S(kappa_.fallback);
        const double sv = value_of(s);
        if (sv <= xs.front()) return S(ys.front());
        if (sv >= xs.back()) return S(ys.back());
        std::size_t hi = 1;
        while (xs[hi] < sv) ++hi;
        const double w = 1.0 / (xs[hi] - xs[hi - 1]);
        return S(ys[hi - 1]) + (s - S(xs[hi - 1])) * S((ys[hi] - ys[hi - 1]) * w);
    }

    /// Pose of the centerline point at arc length s (s clamped to [0, length]).
    GlobalPose centerline_pose(double s) const;

    /// Converts a Frenet state to global coordinates. Throws when s lies
    /// outside the road extent.
    GlobalPose frenet_to_global(double s, double y_e, double psi_e) const;

private:
    void build_centerline_table();

    Profile kappa_;
    Profile lane_lower_;
    Profile lane_upper_;
    Profile v_ref_;
    double length_ = 0.0;

    // centerline pose cache at fixed spacing; queries refine from the
    // nearest lower node with a single RK4 step
    double table_ds_ = 0.1;
    std::vector<GlobalPose> table_;
};

}  // namespace ltmpc
