#include <doctest.h>

#include <cmath>

#include "ltmpc/sim.hpp"

using namespace ltmpc;

namespace {
const VehicleParams kSuv{};

HarnessSolverConfig fast_solver() {
    HarnessSolverConfig cfg;
    cfg.base.max_iterations = 250;
    return cfg;
}
}  // namespace

TEST_CASE("frenet_to_global: straight road is the identity") {
    const Road road = Road::straight(100.0, -5.0, 5.0, 20.0);
    const GlobalPose p = road.frenet_to_global(37.5, 1.25, 0.2);
    CHECK(p.x == doctest::Approx(37.5).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(p.psi == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(road.frenet_to_global(101.0, 0.0, 0.0), std::out_of_range);
}

TEST_CASE("frenet_to_global: constant curvature lies on the circle") {
    const double r = 50.0;
    const Road road = Road::constant_curvature(1.0 / r, 120.0, -5.0, 5.0, 20.0);
    for (double s : {1.0, 17.3, 60.0, 118.0}) {
        const GlobalPose p = road.frenet_to_global(s, 0.0, 0.0);
        // circle center at (0, r)
        const double dist = std::hypot(p.x, p.y - r);
        CHECK(std::abs(dist - r) <= 1e-9 * r);
        CHECK(p.psi == doctest::Approx(s / r).epsilon(1e-9));
    }
    // lateral offset shifts along the normal
    const GlobalPose q = road.frenet_to_global(30.0, 2.0, 0.0);
    const double dist = std::hypot(q.x, q.y - r);
    CHECK(std::abs(dist - (r - 2.0)) <= 1e-8 * r);
}

TEST_CASE("build_scenario: documented layout and parameters") {
    const Scenario lin = build_scenario("linear_n25");
    CHECK(lin.horizon == 25);
    REQUIRE(lin.a_y_max.has_value());
    CHECK(*lin.a_y_max == doctest::Approx(0.3 * kGravity));
    const Scenario non = build_scenario("nonlinear_n13");
    CHECK(non.horizon == 13);
    CHECK_FALSE(non.a_y_max.has_value());
    for (const Scenario* sc : {&lin, &non}) {
        REQUIRE(sc->obstacles.size() == 2);
        int statics = 0;
        for (const auto& ob : sc->obstacles) {
            if (ob.v_t == 0.0 && ob.v_n == 0.0) ++statics;
        }
        CHECK(statics == 1);
        sc->validate();
    }
    CHECK_THROWS_AS(build_scenario("no_such"), std::invalid_argument);
}

TEST_CASE("empty road: all models track the reference tightly") {
    Scenario sc = build_scenario("linear_n25");
    sc.obstacles.clear();
    sc.duration = 3.0;
    for (ModelKind kind : {ModelKind::particle, ModelKind::kinematic, ModelKind::double_track}) {
        const TrajectoryLog log = run_receding_horizon(sc, kind, kSuv, fast_solver());
        REQUIRE(log.completed);
        REQUIRE(static_cast<int>(log.rows.size()) == 30);
        for (const auto& row : log.rows) {
            CHECK(std::abs(row.state[state_layout(kind).y_e]) < 1e-3);
            CHECK(std::abs(row.state[0] - sc.v_ref) < 0.1);
            CHECK(row.state[state_layout(kind).zeta] >= -1e-12);
        }
        // timestamps strictly increasing with spacing T_s
        for (std::size_t i = 1; i < log.rows.size(); ++i) {
            CHECK(log.rows[i].time - log.rows[i - 1].time == doctest::Approx(sc.t_s));
        }
    }
}

TEST_CASE("short nonlinear run: logs satisfy the structural invariants") {
    Scenario sc = build_scenario("nonlinear_n13");
    sc.duration = 4.0;
    const TrajectoryLog log =
        run_receding_horizon(sc, ModelKind::double_track, kSuv, fast_solver());
    REQUIRE(log.completed);
    for (const auto& row : log.rows) {
        if (!row.wheel_lift) {
            CHECK(row.f_z[0] + row.f_z[1] + row.f_z[2] + row.f_z[3] ==
                  doctest::Approx(kSuv.m * kGravity).epsilon(1e-9));
        }
        CHECK(row.state[state_layout(ModelKind::double_track).zeta] >= -1e-12);
        for (const double res : row.collision_residuals) CHECK(res > 0.0);
    }
}

TEST_CASE("a_y cap is honored in closed loop") {
    Scenario sc = build_scenario("linear_n25");
    sc.duration = 10.0;
    const TrajectoryLog log =
        run_receding_horizon(sc, ModelKind::double_track, kSuv, fast_solver());
    REQUIRE(log.completed);
    for (const auto& row : log.rows) {
        CHECK(std::abs(row.a_y) <= 0.3 * kGravity + 1e-3);
    }
}

TEST_CASE("warm and cold starts land on the same closed-loop trajectory") {
    Scenario sc = build_scenario("linear_n25");
    sc.obstacles.resize(1);  // static car only, unique local solution
    sc.duration = 6.0;
    HarnessSolverConfig warm = fast_solver();
    HarnessSolverConfig cold = fast_solver();
    cold.warm_start = false;
    const TrajectoryLog a = run_receding_horizon(sc, ModelKind::kinematic, kSuv, warm);
    const TrajectoryLog b = run_receding_horizon(sc, ModelKind::kinematic, kSuv, cold);
    REQUIRE(a.completed);
    REQUIRE(b.completed);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(std::abs(a.rows[i].state[2] - b.rows[i].state[2]) < 1e-3);  // y_e
        CHECK(std::abs(a.rows[i].state[0] - b.rows[i].state[0]) < 1e-2);  // v
    }
    // warm starts converge in fewer iterations (median over the run)
    auto median_iters = [](const TrajectoryLog& log) {
        std::vector<int> it;
        for (std::size_t i = 1; i < log.rows.size(); ++i) it.push_back(log.rows[i].iterations);
        std::sort(it.begin(), it.end());
        return it[it.size() / 2];
    };
    CHECK(median_iters(a) < median_iters(b));
}

TEST_CASE("compute_metrics: identical logs give zero cross differences") {
    Scenario sc = build_scenario("linear_n25");
    sc.obstacles.clear();
    sc.duration = 2.0;
    TrajectoryLog log = run_receding_horizon(sc, ModelKind::double_track, kSuv, fast_solver());
    log.hcg_scale = 1.0;
    const MetricsReport rep = compute_metrics({log, log});
    REQUIRE(rep.rows.size() == 2);
    for (const auto& m : rep.rows) {
        CHECK(m.rms_y_vs_reference == 0.0);
        CHECK(m.rms_yaw_vs_reference == 0.0);
        CHECK(m.rms_speed_vs_reference == 0.0);
    }
    // mean solve time is the arithmetic mean of the logged times
    double acc = 0.0;
    for (const auto& row : log.rows) acc += row.solve_time;
    CHECK(rep.rows[0].mean_solve_time ==
          doctest::Approx(acc / static_cast<double>(log.rows.size())).epsilon(1e-12));
}

TEST_CASE("validation: zero steering gives matching coast-downs") {
    ValidationOptions opts;
    opts.target_a_y = 0.0;
    opts.duration = 3.0;
    const ValidationReport rep = validate_planner_model(kSuv, opts);
    CHECK(rep.amplitude == 0.0);
    CHECK(rep.rms_yaw_rate <= 1e-6);
    CHECK(rep.rms_v_y <= 1e-6);
}

TEST_CASE("validation: deviation grows with steering amplitude") {
    std::vector<double> devs;
    for (double target : {0.15 * kGravity, 0.3 * kGravity, 0.45 * kGravity}) {
        ValidationOptions opts;
        opts.target_a_y = target;
        opts.duration = 6.0;
        const ValidationReport rep = validate_planner_model(kSuv, opts);
        devs.push_back(rep.rms_yaw_rate);
    }
    CHECK(devs[1] > devs[0]);
    CHECK(devs[2] > devs[1]);
}
