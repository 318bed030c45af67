#pragma once

#include <array>
#include <span>
#include <stdexcept>

#include "ltmpc/models.hpp"

namespace ltmpc {

/// Classical fourth-order Runge-Kutta step for f(x, u, dx) right-hand sides.
/// `f` must fill dx for the same layout it reads from x.
template <class S, class F>
void rk4_step_t(F&& f, std::span<const S> x, std::span<const S> u, double h, std::span<S> out) {
    const std::size_t n = x.size();
    std::array<S, kMaxStates> k1{}, k2{}, k3{}, k4{}, tmp{};
    const auto sp = [n](std::array<S, kMaxStates>& a) { return std::span<S>(a.data(), n); };
    const auto csp = [n](const std::array<S, kMaxStates>& a) {
        return std::span<const S>(a.data(), n);
    };

    f(x, u, sp(k1));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + S(0.5 * h) * k1[i];
    f(csp(tmp), u, sp(k2));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + S(0.5 * h) * k2[i];
    f(csp(tmp), u, sp(k3));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + S(h) * k3[i];
    f(csp(tmp), u, sp(k4));
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i] + S(h / 6.0) * (k1[i] + S(2.0) * k2[i] + S(2.0) * k3[i] + k4[i]);
    }
}

/// One RK4 step of a planner model.
template <class S>
void rk4_model_step(const ModelContext& ctx, std::span<const S> x, std::span<const S> u, double h,
                    std::span<S> out) {
    if (h <= 0.0) throw std::invalid_argument("rk4 step size must be positive");
    rk4_step_t<S>(
        [&ctx](std::span<const S> xs, std::span<const S> us, std::span<S> dxs) {
            model_rhs(ctx, xs, us, dxs);
        },
        x, u, h, out);
}

}  // namespace ltmpc
