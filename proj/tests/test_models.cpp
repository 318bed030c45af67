#include <doctest.h>

#include <cmath>

#include "ltmpc/eight_dof.hpp"
#include "ltmpc/models.hpp"
#include "ltmpc/rk4.hpp"
#include "ltmpc/road.hpp"

using namespace ltmpc;

namespace {
const VehicleParams kSuv{};

template <class State>
std::array<double, kMaxStates> integrate(const ModelContext& ctx, std::array<double, kMaxStates> x,
                                         const std::array<double, 3>& u, double h, int steps) {
    const int nx = state_dim(ctx.kind);
    std::array<double, kMaxStates> next{};
    for (int i = 0; i < steps; ++i) {
        rk4_model_step<double>(ctx, std::span<const double>(x.data(), static_cast<std::size_t>(nx)),
                               u, h, std::span<double>(next.data(), static_cast<std::size_t>(nx)));
        x = next;
    }
    return x;
}
}  // namespace

TEST_CASE("particle: rest rows and straight-road reduction") {
    ParticleState s;
    s.v_t = 15.0;
    const auto d = particle_dynamics(s, {0.0, 0.0, 0.0}, 0.0);
    CHECK(d.v_t == 0.0);
    CHECK(d.psi_e == 0.0);
    CHECK(d.y_e == 0.0);
    CHECK(d.s == doctest::Approx(15.0));
    CHECK(d.x_t == 1.0);
    CHECK(d.zeta_ca == 0.0);
    // kappa = 0: psi_e rate equals the yaw-rate input exactly
    const auto d2 = particle_dynamics(s, {1.0, 0.3, 0.0}, 0.0);
    CHECK(d2.psi_e == doctest::Approx(0.3));
    CHECK(d2.v_t == doctest::Approx(1.0));
    CHECK_THROWS_AS(particle_dynamics(ParticleState{15.0, 0.0, 2.0, 0, 0, 0}, {0, 0, 0}, 0.5),
                    std::invalid_argument);
}

TEST_CASE("particle: constant yaw rate traces a circle of radius v/psi_dot") {
    // straight road: (s, y_e) are global coordinates, frenet_to_global is identity
    const double v = 12.0, yaw_rate = 0.4;  // R = 30 m
    ModelContext ctx{ModelKind::particle, kSuv, nullptr, 0.0, 0.1, std::nullopt};
    std::array<double, kMaxStates> x{};
    x[0] = v;
    const std::array<double, 3> u{0.0, yaw_rate, 0.0};
    const double quarter_turn = 0.5 * M_PI / yaw_rate;
    const int steps = 4000;
    x = integrate<ParticleState>(ctx, x, u, quarter_turn / steps, steps);
    const Road road = Road::straight(100.0, -50.0, 50.0, v);
    const GlobalPose pose = road.frenet_to_global(x[3], x[2], x[1]);
    const double r_expect = v / yaw_rate;
    // circle center sits at (0, R)
    const double r_measured = std::hypot(pose.x - 0.0, pose.y - r_expect);
    CHECK(r_measured == doctest::Approx(r_expect).epsilon(1e-3));
    CHECK(pose.psi == doctest::Approx(0.5 * M_PI).epsilon(1e-3));
}

TEST_CASE("kinematic: zero steer is an equilibrium of the lag states") {
    KinematicState s;
    s.v = 20.0;
    const auto d = kinematic_dynamics(s, {0.0, 0.0, 0.0}, 0.0, kSuv, 0.1);
    CHECK(d.beta == 0.0);
    CHECK(d.psi_dot == 0.0);
    CHECK(d.delta == 0.0);
}

TEST_CASE("kinematic: yaw rate settles to the Ackermann value within 1% after 5 lags") {
    const double yaw_lag = 0.1, v = 15.0, delta = 0.08;
    ModelContext ctx{ModelKind::kinematic, kSuv, nullptr, 0.0, yaw_lag, std::nullopt};
    std::array<double, kMaxStates> x{};
    x[0] = v;
    x[6] = delta;  // steering already applied, rate input zero
    x[5] = std::atan(kSuv.l_r * std::tan(delta) / kSuv.wheelbase());
    const std::array<double, 3> u{0.0, 0.0, 0.0};
    x = integrate<KinematicState>(ctx, x, u, 1e-3, static_cast<int>(5.0 * yaw_lag / 1e-3));
    const double beta = std::atan(kSuv.l_r * std::tan(delta) / kSuv.wheelbase());
    const double target = v * std::cos(beta) * std::tan(delta) / kSuv.wheelbase();
    CHECK(x[7] == doctest::Approx(target).epsilon(0.01));

    // steady cornering radius equals the beta-corrected Ackermann radius
    const double radius = v / x[7];
    const double ackermann = kSuv.wheelbase() / std::tan(delta) / std::cos(beta);
    CHECK(radius == doctest::Approx(ackermann).epsilon(0.01));
}

TEST_CASE("double track: equilibrium and longitudinal force bookkeeping") {
    DoubleTrackState s;
    s.v_x = 20.0;
    const BodyAccel no_acc{};
    const auto d = double_track_dynamics(s, {0.0, 0.0, 0.0}, 0.0, kSuv, no_acc);
    CHECK(d.v_x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.v_y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.psi_dot == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.s == doctest::Approx(20.0));
    CHECK(d.x_t == 1.0);

    // with delta = 0 the axle shares add back up to F_X / m exactly
    const double f_x = 4321.0;
    const auto d2 = double_track_dynamics(s, {0.0, f_x, 0.0}, 0.0, kSuv, no_acc);
    CHECK(d2.v_x == doctest::Approx(f_x / kSuv.m).epsilon(1e-12));

    CHECK_THROWS_AS(double_track_dynamics(DoubleTrackState{}, {0, 0, 0}, 0.0, kSuv, no_acc),
                    std::invalid_argument);
}

TEST_CASE("double track degenerates to a bicycle for vanishing track and CG height") {
    VehicleParams p = kSuv;
    p.t_f = p.t_r = 1e-6;
    p.h_cg = 1e-9;
    p.h_rc = 5e-10;
    DoubleTrackState s;
    s.v_x = 20.0;
    s.v_y = 0.4;
    s.psi_dot = 0.25;
    const BodyAccel acc{0.5, 4.0};
    const auto lt = lateral_load_transfer(acc.a_y, p);
    CHECK(std::abs(lt.front) < 10.0);
    CHECK(std::abs(lt.rear) < 10.0);
    const TireState ts = tire_state_at(s, 0.05, acc, p);
    CHECK(ts.f_yfl == doctest::Approx(ts.f_yfr).epsilon(1e-3));
    CHECK(ts.f_yrl == doctest::Approx(ts.f_yrr).epsilon(1e-3));
}

TEST_CASE("rk4 step: exact for constants, matches exp oracle") {
    // dx/dt = 0
    auto zero_rhs = [](std::span<const double>, std::span<const double>, std::span<double> dx) {
        dx[0] = 0.0;
    };
    std::array<double, 1> x{3.5}, out{};
    std::array<double, 1> u{0.0};
    rk4_step_t<double>(zero_rhs, std::span<const double>(x), std::span<const double>(u), 0.25,
                       std::span<double>(out));
    CHECK(out[0] == 3.5);
    // dx/dt = 1
    auto one_rhs = [](std::span<const double>, std::span<const double>, std::span<double> dx) {
        dx[0] = 1.0;
    };
    rk4_step_t<double>(one_rhs, std::span<const double>(x), std::span<const double>(u), 0.25,
                       std::span<double>(out));
    CHECK(out[0] == doctest::Approx(3.75).epsilon(1e-15));
    // dx/dt = -x against the analytic exponential: one RK4 step reproduces the
    // degree-4 Taylor polynomial exactly, whose distance to e^{-0.1} is the
    // h^5/120 truncation term (~8.2e-8)
    auto decay = [](std::span<const double> xs, std::span<const double>, std::span<double> dx) {
        dx[0] = -xs[0];
    };
    x[0] = 1.0;
    const double h = 0.1;
    rk4_step_t<double>(decay, std::span<const double>(x), std::span<const double>(u), h,
                       std::span<double>(out));
    const double taylor4 = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
    CHECK(out[0] == doctest::Approx(taylor4).epsilon(1e-15));
    CHECK(std::abs(out[0] - 0.9048374180359595) <= 1e-7);
    // two half steps land within 1e-8 of the exponential
    std::array<double, 1> mid{};
    rk4_step_t<double>(decay, std::span<const double>(x), std::span<const double>(u), h / 2,
                       std::span<double>(mid));
    rk4_step_t<double>(decay, std::span<const double>(mid), std::span<const double>(u), h / 2,
                       std::span<double>(out));
    CHECK(std::abs(out[0] - 0.9048374180359595) <= 1e-8);
}

TEST_CASE("rk4 shows fourth-order convergence on every planner model") {
    for (ModelKind kind : {ModelKind::particle, ModelKind::kinematic, ModelKind::double_track}) {
        ModelContext ctx{kind, kSuv, nullptr, 0.01, 0.1, std::nullopt};
        const int nx = state_dim(kind);
        std::array<double, kMaxStates> x{};
        const StateLayout lay = state_layout(kind);
        x[static_cast<std::size_t>(lay.speed)] = 18.0;
        std::array<double, 3> u{};
        switch (kind) {
            case ModelKind::particle: u = {0.5, 0.15, 0.0}; break;
            case ModelKind::kinematic: u = {0.5, 0.2, 0.0}; break;
            case ModelKind::double_track: u = {0.04, 800.0, 0.0}; break;
        }
        const double h = 0.1;
        std::array<double, kMaxStates> coarse{}, fine{}, finer{}, tmp{};
        rk4_model_step<double>(ctx, std::span<const double>(x.data(), static_cast<std::size_t>(nx)), u, h,
                               std::span<double>(coarse.data(), static_cast<std::size_t>(nx)));
        rk4_model_step<double>(ctx, std::span<const double>(x.data(), static_cast<std::size_t>(nx)), u,
                               h / 2, std::span<double>(tmp.data(), static_cast<std::size_t>(nx)));
        rk4_model_step<double>(ctx, std::span<const double>(tmp.data(), static_cast<std::size_t>(nx)), u,
                               h / 2, std::span<double>(fine.data(), static_cast<std::size_t>(nx)));
        // reference: 4 steps of h/4
        std::array<double, kMaxStates> ref = x;
        for (int i = 0; i < 8; ++i) {
            rk4_model_step<double>(ctx, std::span<const double>(ref.data(), static_cast<std::size_t>(nx)),
                                   u, h / 8, std::span<double>(finer.data(), static_cast<std::size_t>(nx)));
            ref = finer;
        }
        double err_coarse = 0.0, err_fine = 0.0;
        for (int i = 0; i < nx; ++i) {
            err_coarse = std::max(err_coarse, std::abs(coarse[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]));
            err_fine = std::max(err_fine, std::abs(fine[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]));
        }
        CHECK(err_coarse / std::max(err_fine, 1e-300) >= 12.0);
    }
}

TEST_CASE("8dof: straight running is an equilibrium of lateral, yaw and roll") {
    EightDofState x = eight_dof_initial(kSuv, 20.0);
    const auto d = reference_8dof_dynamics(x, {0.0, 0.0}, kSuv, BodyAccel{});
    CHECK(d.v_y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.psi_dot == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.phi_dot == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(d.omega_fl) < 1e-9);
}

TEST_CASE("8dof: vertical loads always sum to the vehicle weight") {
    const auto trace =
        simulate_8dof(kSuv, 20.0, 5.0, 1e-3, [](double t) { return 0.05 * std::sin(3.0 * t); });
    for (const auto& o : trace.outputs) {
        if (o.f_z.lift) continue;
        CHECK(o.f_z.fl + o.f_z.fr + o.f_z.rl + o.f_z.rr ==
              doctest::Approx(kSuv.m * kGravity).epsilon(1e-9));
    }
}

TEST_CASE("8dof: steady roll angle settles to the static formula within 5%") {
    const auto trace = simulate_8dof(kSuv, 20.0, 12.0, 1e-3, [](double) { return 0.03; });
    const auto& ss = trace.state.back();
    const double ay_ss = trace.outputs.back().accel.a_y;
    CHECK(ss.phi == doctest::Approx(roll_angle(ay_ss, kSuv)).epsilon(0.05));
}

TEST_CASE("magic formula slope matches the quadratic cornering stiffness fit") {
    for (double fz : {3000.0, 5600.0, 8000.0}) {
        const TireCoeffs c = tire_coeffs(fz, kSuv);
        const double h = 1e-6;
        const double slope =
            (magic_formula_lateral(h, fz, kSuv) - magic_formula_lateral(-h, fz, kSuv)) / (2 * h);
        CHECK(slope == doctest::Approx(c.cornering_stiffness).epsilon(1e-4));
        // peak value agrees with the piecewise model's saturation level
        double peak = 0.0;
        for (int i = 0; i < 400; ++i) {
            peak = std::max(peak, magic_formula_lateral(0.5 * i / 400.0, fz, kSuv));
        }
        CHECK(peak == doctest::Approx(c.peak_force).epsilon(0.03));
    }
}
