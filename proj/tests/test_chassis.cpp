#include <doctest.h>

#include <cmath>
#include <random>

#include "ltmpc/chassis.hpp"
#include "ltmpc/eight_dof.hpp"

using namespace ltmpc;

namespace {
const VehicleParams kSuv{};
}

TEST_CASE("roll angle: zero input, linearity, frozen closed-form value") {
    CHECK(roll_angle(0.0, kSuv) == 0.0);
    const double phi1 = roll_angle(1.7, kSuv);
    CHECK(roll_angle(3.4, kSuv) == doctest::Approx(2.0 * phi1).epsilon(1e-14));
    // independent spreadsheet-style evaluation of the closed form
    CHECK(roll_angle(3.0, kSuv) == doctest::Approx(0.0298178190930211).epsilon(1e-12));
}

TEST_CASE("roll angle rejects an unstable parameter set") {
    VehicleParams bad = kSuv;
    bad.K_phi_f = 1000.0;
    bad.K_phi_r = 1000.0;  // softer than m*g*(h_cg - h_rc)
    CHECK_THROWS_AS(roll_angle(1.0, bad), std::invalid_argument);
    CHECK_THROWS_AS((void)bad.validate(), std::invalid_argument);
}

TEST_CASE("lateral load transfer: zero, odd sign, frozen values") {
    const auto lt0 = lateral_load_transfer(0.0, kSuv);
    CHECK(lt0.front == 0.0);
    CHECK(lt0.rear == 0.0);
    for (double ay : {0.5, 2.0, -4.0}) {
        const auto lt = lateral_load_transfer(ay, kSuv);
        CHECK(std::signbit(lt.front) == std::signbit(ay));
        CHECK(std::signbit(lt.rear) == std::signbit(ay));
    }
    const auto lt = lateral_load_transfer(3.0, kSuv);
    CHECK(lt.front == doctest::Approx(1894.63966212717).epsilon(1e-12));
    CHECK(lt.rear == doctest::Approx(1498.6034014385127).epsilon(1e-12));
}

TEST_CASE("higher CG strictly increases load transfer") {
    const auto low = lateral_load_transfer(3.0, kSuv.with_hcg_scale(0.95));
    const auto high = lateral_load_transfer(3.0, kSuv.with_hcg_scale(1.05));
    CHECK(high.front > low.front);
    CHECK(high.rear > low.rear);
}

TEST_CASE("vertical forces: static split, conservation, left-right difference") {
    const double wb = kSuv.wheelbase();
    const auto rest = vertical_forces(0.0, 0.0, kSuv);
    CHECK(rest.fr == doctest::Approx(kSuv.m * kGravity * kSuv.l_r / (2 * wb)).epsilon(1e-14));
    CHECK(rest.fl == doctest::Approx(rest.fr).epsilon(1e-14));
    CHECK(rest.rr == doctest::Approx(kSuv.m * kGravity * kSuv.l_f / (2 * wb)).epsilon(1e-14));

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> acc(-6.0, 6.0);
    for (int i = 0; i < 300; ++i) {
        const double ax = acc(rng), ay = acc(rng);
        const auto f = vertical_forces(ax, ay, kSuv);
        if (!f.lift) {
            CHECK(f.fr + f.fl + f.rr + f.rl ==
                  doctest::Approx(kSuv.m * kGravity).epsilon(1e-9));
        }
        const auto lt = lateral_load_transfer(ay, kSuv);
        CHECK(f.fr - f.fl == doctest::Approx(2.0 * lt.front).epsilon(1e-9));
        CHECK(f.rr - f.rl == doctest::Approx(2.0 * lt.rear).epsilon(1e-9));
    }

    // frozen values from an independent evaluation at (a_x, a_y) = (1.2, 3.0)
    const auto f = vertical_forces(1.2, 3.0, kSuv);
    CHECK(f.fr == doctest::Approx(7567.510351782342).epsilon(1e-12));
    CHECK(f.fl == doctest::Approx(3778.2310275280024).epsilon(1e-12));
    CHECK(f.rr == doctest::Approx(7107.232711783339).epsilon(1e-12));
    CHECK(f.rl == doctest::Approx(4110.025908906315).epsilon(1e-12));
}

TEST_CASE("vertical forces clamp at wheel lift and set the flag") {
    const auto f = vertical_forces(0.0, 25.0, kSuv);  // absurd lateral acceleration
    CHECK(f.lift);
    CHECK(f.fl >= 0.0);
    CHECK(f.rl >= 0.0);
}

TEST_CASE("slip angles: straight running and pure steer") {
    const auto zero = slip_angles(20.0, 0.0, 0.0, 0.0, kSuv);
    CHECK(zero.fl == 0.0);
    CHECK(zero.fr == 0.0);
    CHECK(zero.rl == 0.0);
    CHECK(zero.rr == 0.0);
    const auto steer = slip_angles(20.0, 0.0, 0.0, 0.05, kSuv);
    CHECK(steer.fl == doctest::Approx(0.05));
    CHECK(steer.fr == doctest::Approx(0.05));
    CHECK(steer.rl == 0.0);
    CHECK(steer.rr == 0.0);
    CHECK_THROWS_AS(slip_angles(0.0, 0.0, 0.0, 0.0, kSuv), std::invalid_argument);
}

TEST_CASE("steady-state slip angles match the converged 8dof run within 5%") {
    const double delta = 0.03;
    const auto trace = simulate_8dof(kSuv, 20.0, 12.0, 1e-3, [delta](double) { return delta; });
    const EightDofState& ss = trace.state.back();
    const auto predicted = slip_angles(ss.v_x, ss.v_y, ss.psi_dot, delta, kSuv);
    const auto& measured = trace.outputs.back().alpha;
    CHECK(predicted.fl == doctest::Approx(measured.fl).epsilon(0.05));
    CHECK(predicted.fr == doctest::Approx(measured.fr).epsilon(0.05));
    CHECK(predicted.rl == doctest::Approx(measured.rl).epsilon(0.05));
    CHECK(predicted.rr == doctest::Approx(measured.rr).epsilon(0.05));
    // independent small-angle kinematics of circular motion
    const double af_small = delta - (ss.v_y + kSuv.l_f * ss.psi_dot) / ss.v_x;
    const double ar_small = -(ss.v_y - kSuv.l_r * ss.psi_dot) / ss.v_x;
    CHECK(0.5 * (predicted.fl + predicted.fr) == doctest::Approx(af_small).epsilon(0.05));
    CHECK(0.5 * (predicted.rl + predicted.rr) == doctest::Approx(ar_small).epsilon(0.05));
}
