#include <doctest.h>

#include <cmath>
#include <random>

#include "ltmpc/tire.hpp"

using namespace ltmpc;

namespace {
const VehicleParams kSuv{};
}

TEST_CASE("zero slip gives zero force on any load") {
    for (double fz : {0.0, 1000.0, 5600.0, 11200.0}) {
        CHECK(tire_lateral_force(0.0, fz, kSuv) == 0.0);
    }
}

TEST_CASE("zero load gives zero force") {
    CHECK(tire_lateral_force(0.2, 0.0, kSuv) == 0.0);
    CHECK(tire_lateral_force(-0.2, 0.0, kSuv) == 0.0);
}

TEST_CASE("branch values agree at the breakpoints") {
    // both branch formulas evaluated independently at 0.85*alpha_0 and
    // 1.75*alpha_0 reduce to 0.85*C_alpha*alpha_0 and F_peak respectively
    for (double fz : {1500.0, 5600.0, 9000.0}) {
        const TireCoeffs c = tire_coeffs(fz, kSuv);
        const double linear_at_085 = c.cornering_stiffness * 0.85 * c.alpha_0;
        const double middle_at_085 =
            c.cornering_stiffness / 6.0 * (0.85 * c.alpha_0 + 4.25 * c.alpha_0);
        CHECK(linear_at_085 == doctest::Approx(middle_at_085).epsilon(1e-12));
        const double middle_at_175 =
            c.cornering_stiffness / 6.0 * (1.75 * c.alpha_0 + 4.25 * c.alpha_0);
        CHECK(middle_at_175 == doctest::Approx(c.peak_force).epsilon(1e-12));
        // the implementation hits the same values
        CHECK(tire_lateral_force(1.75 * c.alpha_0, fz, kSuv) ==
              doctest::Approx(c.peak_force).epsilon(1e-9));
        CHECK(tire_lateral_force(0.85 * c.alpha_0, fz, kSuv) ==
              doctest::Approx(0.85 * c.peak_force).epsilon(1e-9));
    }
}

TEST_CASE("continuity at both breakpoints across the load range") {
    for (int i = 0; i <= 40; ++i) {
        const double fz = (0.2 + 1.8 * i / 40.0) * kSuv.F_z0;
        const TireCoeffs c = tire_coeffs(fz, kSuv);
        for (double bp : {0.85 * c.alpha_0, 1.75 * c.alpha_0}) {
            const double below = tire_lateral_force(bp * (1.0 - 1e-10), fz, kSuv);
            const double above = tire_lateral_force(bp * (1.0 + 1e-10), fz, kSuv);
            CHECK(std::abs(below - above) <= 1e-9 * std::abs(c.peak_force));
        }
    }
}

TEST_CASE("odd in alpha and monotone up to saturation") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> load(0.2 * kSuv.F_z0, 2.0 * kSuv.F_z0);
    std::uniform_real_distribution<double> slip(0.0, 0.4);
    for (int trial = 0; trial < 200; ++trial) {
        const double fz = load(rng);
        const double a = slip(rng);
        CHECK(tire_lateral_force(-a, fz, kSuv) ==
              doctest::Approx(-tire_lateral_force(a, fz, kSuv)).epsilon(1e-14));
    }
    for (int trial = 0; trial < 50; ++trial) {
        const double fz = load(rng);
        const TireCoeffs c = tire_coeffs(fz, kSuv);
        double prev = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double a = 1.75 * c.alpha_0 * i / 100.0;
            const double f = tire_lateral_force(a, fz, kSuv);
            CHECK(f >= prev - 1e-12);
            prev = f;
        }
    }
}

TEST_CASE("dual propagation matches the closed-form slope on the linear branch") {
    const double fz = 5600.0;
    const TireCoeffs c = tire_coeffs(fz, kSuv);
    const Dual alpha(0.3 * c.alpha_0, 1, 0);
    const Dual f = tire_lateral_force(alpha, Dual::constant(fz, 1), kSuv);
    CHECK(f.d[0] == doctest::Approx(c.cornering_stiffness).epsilon(1e-12));
}
