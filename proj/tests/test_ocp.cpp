#include <doctest.h>

#include <cmath>
#include <random>

#include "ltmpc/ocp.hpp"
#include "ltmpc/rk4.hpp"
#include "ltmpc/solver.hpp"

using namespace ltmpc;
using Eigen::VectorXd;

namespace {

OcpSpec make_dt_ocp(int horizon) {
    OcpSpec ocp;
    ocp.kind = ModelKind::double_track;
    ocp.horizon = horizon;
    ocp.road = std::make_shared<Road>(Road::straight(400.0, -1.75, 5.25, 20.0));
    Obstacle ob;
    ob.s_0 = 40.0;
    ocp.obstacles = {ob};
    return ocp;
}

std::array<double, 8> dt_x0() { return {20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }

}  // namespace

TEST_CASE("propagate_obstacle: static, initial, constant-velocity cases") {
    Obstacle ob;
    ob.s_0 = 12.0;
    ob.y_e0 = 3.5;
    CHECK(propagate_obstacle(ob, 5.0).s == 12.0);
    CHECK(propagate_obstacle(ob, 5.0).y_e == 3.5);
    ob.v_t = -10.0;
    CHECK(propagate_obstacle(ob, 0.0).s == 12.0);
    CHECK(propagate_obstacle(ob, 2.0).s == doctest::Approx(12.0 - 20.0));
    ob.a_t = 1.0;
    CHECK(propagate_obstacle(ob, 2.0).s == doctest::Approx(12.0 - 20.0 + 2.0));
    CHECK_THROWS_AS(propagate_obstacle(ob, -1.0), std::invalid_argument);
}

TEST_CASE("collision_residual: center, boundary, slack monotonicity") {
    Obstacle ob;
    ob.s_0 = 100.0;
    ob.y_e0 = 0.0;
    ob.half_length = 2.5;
    ob.half_width = 1.0;
    const double ts = 0.1;
    // ego exactly at the obstacle center
    CHECK(collision_residual(100.0, 0.0, 0.0, ob, 0.0, ts, 0.0) == doctest::Approx(-1.0));
    // on-ellipse point one longitudinal half axis ahead
    const double dl = std::sqrt(2.0 * 2.5 * 2.5);
    CHECK(collision_residual(100.0 + dl, 0.0, 0.0, ob, 0.0, ts, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // growing slack enlarges the ellipse: same point moves strictly inside
    const double with_slack = collision_residual(100.0 + dl, 0.0, 2.0, ob, 0.0, ts, 0.0);
    CHECK(with_slack < 0.0);
    // monotone nonincreasing in the slack for any s-offset point
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ds(-8.0, 8.0);
    std::uniform_real_distribution<double> zeta(0.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double s = 100.0 + ds(rng);
        if (std::abs(s - 100.0) < 1e-6) continue;
        const double z1 = zeta(rng), z2 = z1 + 0.5;
        CHECK(collision_residual(s, 0.7, z2, ob, 0.0, ts, 0.15) <=
              collision_residual(s, 0.7, z1, ob, 0.0, ts, 0.15) + 1e-12);
    }
    // the lateral buffer enlarges the ellipse laterally
    CHECK(collision_residual(100.0, 1.6, 0.0, ob, 0.0, ts, 0.15) <
          collision_residual(100.0, 1.6, 0.0, ob, 0.0, ts, 0.0));
}

TEST_CASE("stage cost: zero on reference, quadratic scaling, sub-threshold slip is free") {
    OcpSpec ocp = make_dt_ocp(5);
    const std::array<double, 8> on_ref{20.0, 0, 0, 0, 0, 0, 0, 0};
    const std::array<double, 3> zero_u{};
    CHECK(stage_cost(on_ref, zero_u, zero_u, ocp) == 0.0);

    std::array<double, 8> off = on_ref;
    off[4] = 0.5;  // y_e
    const double c1 = stage_cost(off, zero_u, zero_u, ocp);
    off[4] = 1.0;
    const double c2 = stage_cost(off, zero_u, zero_u, ocp);
    CHECK(c2 == doctest::Approx(4.0 * c1).epsilon(1e-12));

    // small steering keeps every slip angle below the hinge threshold:
    // the only cost is the input itself
    std::array<double, 3> small_u{0.01, 0.0, 0.0};
    const double expected = ocp.weights.r[0] * 0.01 * 0.01 + ocp.weights.s[0] * 0.01 * 0.01;
    CHECK(stage_cost(on_ref, small_u, zero_u, ocp) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("transcribe: dimension bookkeeping for N=1 double track") {
    OcpSpec ocp = make_dt_ocp(1);
    const auto x0 = dt_x0();
    const Trajectory guess = rollout_guess(ocp, x0);
    const NlpProblem p = transcribe(ocp, x0, guess);
    CHECK(p.n_dec == 2 * 8 + 1 * 3);
    CHECK(p.n_eq == 16);
}

TEST_CASE("transcribe: rollout guess is defect-feasible and cost matches stage sums") {
    OcpSpec ocp = make_dt_ocp(6);
    ocp.u_prev = {0.01, 200.0, 0.0};
    const auto x0 = dt_x0();
    Trajectory guess = rollout_guess(ocp, x0);
    // make the controls non-trivial, then re-integrate to stay defect-feasible
    ModelContext ctx{ocp.kind, ocp.vehicle, ocp.road.get(), 0.0, ocp.t_s, std::nullopt};
    for (int k = 0; k < 6; ++k) {
        guess.controls[static_cast<std::size_t>(k)] = {0.02 * (k % 2 ? 1 : -1), 300.0, 0.1};
    }
    for (int k = 0; k < 6; ++k) {
        rk4_model_step<double>(
            ctx, std::span<const double>(guess.states[static_cast<std::size_t>(k)].data(), 8),
            guess.controls[static_cast<std::size_t>(k)], ocp.t_s,
            std::span<double>(guess.states[static_cast<std::size_t>(k + 1)].data(), 8));
    }
    const NlpProblem p = transcribe(ocp, x0, guess);
    const VectorXd z = pack(guess);
    CHECK(p.eq(z).cwiseAbs().maxCoeff() <= 1e-12);

    double manual = 0.0;
    std::array<double, 3> u_prev = ocp.u_prev;
    for (int k = 0; k < 6; ++k) {
        manual += stage_cost(guess.states[static_cast<std::size_t>(k)],
                             guess.controls[static_cast<std::size_t>(k)], u_prev, ocp);
        u_prev = guess.controls[static_cast<std::size_t>(k)];
    }
    manual += terminal_cost(guess.states[6], ocp);
    CHECK(p.cost(z) == doctest::Approx(manual).epsilon(1e-12));

    // unpacking and re-integrating a defect-feasible vector reproduces it bitwise
    const Trajectory round = unpack(z, ocp.kind, 6);
    Trajectory reint = round;
    for (int k = 0; k < 6; ++k) {
        rk4_model_step<double>(
            ctx, std::span<const double>(reint.states[static_cast<std::size_t>(k)].data(), 8),
            reint.controls[static_cast<std::size_t>(k)], ocp.t_s,
            std::span<double>(reint.states[static_cast<std::size_t>(k + 1)].data(), 8));
    }
    for (int k = 0; k <= 6; ++k) {
        for (int i = 0; i < 8; ++i) {
            CHECK(reint.states[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] ==
                  round.states[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("transcribe: boundary cases of the inequality rows") {
    OcpSpec ocp = make_dt_ocp(2);
    ocp.a_y_max = 0.3 * kGravity;
    const auto x0 = dt_x0();
    Trajectory guess = rollout_guess(ocp, x0);
    const NlpProblem p = transcribe(ocp, x0, guess);
    const auto names = inequality_row_names(ocp);
    REQUIRE(static_cast<int>(names.size()) == p.n_ineq);

    // rest case with zero inputs: every residual sits strictly inside its bounds
    const VectorXd g0 = p.ineq(pack(guess));
    for (int r = 0; r < p.n_ineq; ++r) {
        CHECK(g0[r] >= p.lb_g[r] - 1e-9);
        CHECK(g0[r] <= p.ub_g[r] + 1e-9);
    }

    // F_X = P_max / v_x puts the power row exactly on its bound
    Trajectory at_power = guess;
    at_power.controls[0][1] = ocp.vehicle.P_max / 20.0;
    const VectorXd g1 = p.ineq(pack(at_power));
    bool found_power = false;
    for (std::size_t r = 0; r < names.size(); ++r) {
        if (names[r] == "power[0]") {
            CHECK(g1[static_cast<Eigen::Index>(r)] == doctest::Approx(1.0).epsilon(1e-12));
            found_power = true;
        }
    }
    CHECK(found_power);
}

TEST_CASE("friction-circle residual is exactly on the bound at f_y = mu*F_z, F_X = 0") {
    // assembled the same way the transcription does it, on one axle
    const VehicleParams p{};
    const double fz = 2.0 * p.m * kGravity * p.l_r / (2.0 * p.wheelbase());
    const double fy = p.mu * fz;
    const double mg = p.weight();
    const double residual = (p.mu * fz) * (p.mu * fz) - fy * fy - 0.0;
    CHECK(residual / (mg * mg) == doctest::Approx(0.0));
}

TEST_CASE("transcribe: every dual-built jacobian matches central differences") {
    OcpSpec ocp = make_dt_ocp(3);
    ocp.a_y_max = 0.3 * kGravity;
    ocp.u_prev = {0.01, 100.0, 0.0};
    const auto x0 = dt_x0();
    const Trajectory guess = rollout_guess(ocp, x0);
    const NlpProblem p = transcribe(ocp, x0, guess);

    std::mt19937 rng(42);
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd z = pack(guess);
        for (int k = 0; k <= 3; ++k) {
            z[k * 8 + 0] += 0.4 * jitter(rng);   // v_x
            z[k * 8 + 1] += 0.05 * jitter(rng);  // v_y
            z[k * 8 + 2] += 0.03 * jitter(rng);  // psi_dot
            z[k * 8 + 4] += 0.2 * jitter(rng);   // y_e
            z[k * 8 + 7] = std::abs(0.1 * jitter(rng));
        }
        for (int k = 0; k < 3; ++k) {
            z[4 * 8 + k * 3 + 0] += 0.02 * jitter(rng);
            z[4 * 8 + k * 3 + 1] += 400.0 * jitter(rng);
        }
        const double tol = 2e-5;
        const Eigen::MatrixXd je = p.eq_jac(z);
        const Eigen::MatrixXd je_fd = differentiate(p.eq, z);
        CHECK((je - je_fd).cwiseAbs().maxCoeff() <
              tol * std::max(1.0, je.cwiseAbs().maxCoeff()));
        const Eigen::MatrixXd jg = p.ineq_jac(z);
        const Eigen::MatrixXd jg_fd = differentiate(p.ineq, z);
        CHECK((jg - jg_fd).cwiseAbs().maxCoeff() <
              tol * std::max(1.0, jg.cwiseAbs().maxCoeff()));
        const Eigen::MatrixXd jr = p.cost_residual_jac(z);
        const Eigen::MatrixXd jr_fd = differentiate(p.cost_residuals, z);
        CHECK((jr - jr_fd).cwiseAbs().maxCoeff() <
              tol * std::max(1.0, jr.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("shift_warm_start: definition and fixed point") {
    OcpSpec ocp = make_dt_ocp(4);
    Trajectory t = Trajectory::zero(ModelKind::double_track, 4);
    for (int k = 0; k <= 4; ++k) t.states[static_cast<std::size_t>(k)][5] = 2.0 * k;  // s
    for (int k = 0; k < 4; ++k) t.controls[static_cast<std::size_t>(k)][0] = 0.1 * k;
    const Trajectory shifted = shift_warm_start(t, 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(shifted.states[static_cast<std::size_t>(k)][5] ==
              t.states[static_cast<std::size_t>(k + 1)][5]);
    }
    CHECK(shifted.states[4][5] == t.states[4][5]);
    for (int k = 0; k + 1 < 4; ++k) {
        CHECK(shifted.controls[static_cast<std::size_t>(k)][0] ==
              t.controls[static_cast<std::size_t>(k + 1)][0]);
    }
    CHECK(shifted.controls[3][0] == t.controls[3][0]);

    // a constant trajectory shifts to itself
    Trajectory constant = Trajectory::zero(ModelKind::double_track, 4);
    for (auto& s : constant.states) s[0] = 20.0;
    const Trajectory same = shift_warm_start(constant, 4);
    for (int k = 0; k <= 4; ++k) CHECK(same.states[static_cast<std::size_t>(k)][0] == 20.0);
}

TEST_CASE("zero-control trajectory is optimal for the obstacle-free on-reference case") {
    OcpSpec ocp = make_dt_ocp(10);
    ocp.obstacles.clear();
    const auto x0 = dt_x0();
    const Trajectory guess = rollout_guess(ocp, x0);
    const NlpProblem p = transcribe(ocp, x0, guess);
    const VectorXd z = pack(guess);
    CHECK(p.cost(z) == doctest::Approx(0.0));
    const VectorXd g = p.ineq(z);
    for (int r = 0; r < p.n_ineq; ++r) {
        CHECK(g[r] >= p.lb_g[r] + 1e-6);  // strictly slack
    }
    const SolveResult res = solve(p, z, SolverConfig{});
    CHECK(res.status == SolveStatus::converged);
    CHECK(p.cost(res.x) <= 1e-9);
}
