#include "ltmpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltmpc/rk4.hpp"

namespace ltmpc {

void Scenario::validate() const {
    if (!road) throw std::invalid_argument("scenario has no road");
    if (horizon < 1) throw std::invalid_argument("scenario horizon must be >= 1");
    if (t_s <= 0.0 || duration <= 0.0) {
        throw std::invalid_argument("scenario times must be positive");
    }
    for (const auto& ob : obstacles) {
        ob.validate();
        // ego starts at (s=0, y_e0); the footprint must not contain it
        const double res = collision_residual(0.0, y_e0, 0.0, ob, 0.0, t_s, 0.0);
        if (res <= 0.0) throw std::invalid_argument("obstacle overlaps the ego start position");
    }
}

namespace {

// Shared collision-avoidance layout: a static vehicle ahead in the ego lane
// and an oncoming vehicle in the adjacent lane. Geometry values are
// configuration defaults; only the 150-200 m conflict region is anchored.
Scenario base_scenario() {
    Scenario sc;
    sc.road = std::make_shared<Road>(Road::straight(400.0, -1.75, 5.25, 20.0));
    Obstacle parked;
    parked.s_0 = 150.0;
    parked.y_e0 = 0.0;
    parked.half_length = 2.5;
    parked.half_width = 1.5;
    Obstacle oncoming;
    oncoming.s_0 = 200.0;
    oncoming.y_e0 = 3.5;
    oncoming.v_t = -15.0;
    oncoming.half_length = 2.5;
    oncoming.half_width = 1.5;
    sc.obstacles = {parked, oncoming};
    sc.v0 = 20.0;
    sc.v_ref = 20.0;
    sc.duration = 12.0;
    sc.lane_lower = -1.75;
    sc.lane_upper = 5.25;
    return sc;
}

}  // namespace

Scenario build_scenario(const std::string& name) {
    Scenario sc = base_scenario();
    if (name == "linear_n25") {
        sc.name = name;
        sc.horizon = 25;
        sc.a_y_max = 0.3 * kGravity;
        return sc;
    }
    if (name == "nonlinear_n13") {
        sc.name = name;
        sc.horizon = 13;
        sc.a_y_max.reset();
        return sc;
    }
    throw std::invalid_argument("unknown scenario: " + name);
}

std::vector<std::string> scenario_names() { return {"linear_n25", "nonlinear_n13"}; }

namespace {

std::array<double, kMaxStates> initial_state(const Scenario& sc, ModelKind kind) {
    std::array<double, kMaxStates> x{};
    const StateLayout lay = state_layout(kind);
    x[static_cast<std::size_t>(lay.speed)] = sc.v0;
    x[static_cast<std::size_t>(lay.y_e)] = sc.y_e0;
    return x;
}

OcpSpec make_ocp(const Scenario& sc, ModelKind kind, const VehicleParams& vehicle) {
    OcpSpec ocp;
    ocp.kind = kind;
    ocp.horizon = sc.horizon;
    ocp.t_s = sc.t_s;
    ocp.weights = CostWeights::defaults(kind);
    ocp.vehicle = vehicle;
    ocp.road = sc.road;
    ocp.obstacles = sc.obstacles;
    ocp.v_ref = sc.v_ref;
    ocp.lane_lower = sc.lane_lower;
    ocp.lane_upper = sc.lane_upper;
    ocp.a_y_max = sc.a_y_max;
    return ocp;
}

struct PlantState {
    std::array<double, kMaxStates> x{};
    BodyAccel lag{};
};

// integrates the applied control over one sample period at fine substeps,
// refreshing the lagged accelerations from each substep's own derivatives
void plant_advance(const ModelContext& base_ctx, PlantState& plant,
                   const std::array<double, kNumControls>& u, double t_s, int substeps) {
    const int nx = state_dim(base_ctx.kind);
    const double h = t_s / substeps;
    ModelContext ctx = base_ctx;
    for (int i = 0; i < substeps; ++i) {
        if (ctx.kind == ModelKind::double_track) ctx.lagged_accel = plant.lag;
        std::array<double, kMaxStates> dx{}, next{};
        model_rhs<double>(ctx, std::span<const double>(plant.x.data(), static_cast<std::size_t>(nx)),
                          u, std::span<double>(dx.data(), static_cast<std::size_t>(nx)));
        rk4_model_step<double>(ctx, std::span<const double>(plant.x.data(), static_cast<std::size_t>(nx)),
                               u, h, std::span<double>(next.data(), static_cast<std::size_t>(nx)));
        if (ctx.kind == ModelKind::double_track) {
            plant.lag = BodyAccel{dx[0] - plant.x[1] * plant.x[2], dx[1] + plant.x[0] * plant.x[2]};
        }
        plant.x = next;
    }
}

// model-consistent accelerations for logging and implied-load computation
BodyAccel logged_accel(ModelKind kind, const std::array<double, kMaxStates>& x,
                       const std::array<double, kNumControls>& u, const VehicleParams& p) {
    switch (kind) {
        case ModelKind::particle:
            return {u[0], x[0] * u[1]};
        case ModelKind::kinematic:
            return {u[0], x[0] * x[7]};
        case ModelKind::double_track:
            return {u[1] / p.m, x[0] * x[2]};
    }
    return {};
}

}  // namespace

TrajectoryLog run_receding_horizon(const Scenario& scenario, ModelKind kind,
                                   const VehicleParams& vehicle,
                                   const HarnessSolverConfig& solver_cfg) {
    scenario.validate();
    vehicle.validate();

    TrajectoryLog log;
    log.scenario = scenario.name;
    log.run_label = to_string(kind);
    log.kind = kind;
    log.t_s = scenario.t_s;
    log.obstacles = scenario.obstacles;

    OcpSpec ocp = make_ocp(scenario, kind, vehicle);
    const StateLayout lay = state_layout(kind);
    const int nx = state_dim(kind);
    const int n_steps = static_cast<int>(std::round(scenario.duration / scenario.t_s));

    PlantState plant;
    plant.x = initial_state(scenario, kind);
    std::array<double, kNumControls> u_prev{};
    bool have_prev = false;
    Trajectory prev_traj;
    ModelContext plant_ctx{kind, vehicle, scenario.road.get(), 0.0, scenario.t_s, std::nullopt};

    log.rows.reserve(static_cast<std::size_t>(n_steps));
    for (int step = 0; step < n_steps; ++step) {
        ocp.u_prev = u_prev;
        Trajectory guess;
        if (have_prev && solver_cfg.warm_start) {
            guess = shift_warm_start(prev_traj, ocp.horizon);
            guess.states[0] = plant.x;
        } else {
            guess = rollout_guess(ocp, std::span<const double>(plant.x.data(), static_cast<std::size_t>(nx)));
        }
        const NlpProblem problem =
            transcribe(ocp, std::span<const double>(plant.x.data(), static_cast<std::size_t>(nx)), guess);
        SolverConfig cfg = solver_cfg.base;
        cfg.mu_init = (have_prev && solver_cfg.warm_start) ? solver_cfg.mu_init_warm
                                                           : solver_cfg.mu_init_cold;
        const SolveResult res = solve(problem, pack(guess), cfg);

        const bool usable = res.status == SolveStatus::converged || res.kkt_residual <= 1e-3;
        Trajectory traj;
        if (usable) {
            traj = unpack(res.x, kind, ocp.horizon);
        } else if (have_prev) {
            // degraded mode: reuse the previous plan shifted one interval
            traj = shift_warm_start(prev_traj, ocp.horizon);
        } else {
            log.completed = false;
            log.failure_reason = "solver failed on step " + std::to_string(step) + " (" +
                                 to_string(res.status) + ")";
            break;
        }
        const std::array<double, kNumControls> u0 = traj.controls[0];

        LogRow row;
        row.time = step * scenario.t_s;
        row.state = plant.x;
        row.control = u0;
        row.iterations = res.iterations;
        row.solve_status = to_string(res.status);
        row.kkt_residual = res.kkt_residual;
        row.solve_time = res.solve_time;

        const BodyAccel acc = logged_accel(kind, plant.x, u0, vehicle);
        row.a_x = acc.a_x;
        row.a_y = acc.a_y;
        const auto lt = lateral_load_transfer(acc.a_y, vehicle);
        row.df_zf = lt.front;
        row.df_zr = lt.rear;
        if (kind == ModelKind::double_track) {
            const DoubleTrackState dts = double_track_from_array(
                std::span<const double>(plant.x.data(), static_cast<std::size_t>(nx)));
            const TireState ts = tire_state_at(dts, u0[0], acc, vehicle);
            row.f_z[0] = ts.f_z.fl;
            row.f_z[1] = ts.f_z.fr;
            row.f_z[2] = ts.f_z.rl;
            row.f_z[3] = ts.f_z.rr;
            row.alpha[0] = ts.alpha.fl;
            row.alpha[1] = ts.alpha.fr;
            row.alpha[2] = ts.alpha.rl;
            row.alpha[3] = ts.alpha.rr;
            row.f_y[0] = ts.f_yfl;
            row.f_y[1] = ts.f_yfr;
            row.f_y[2] = ts.f_yrl;
            row.f_y[3] = ts.f_yrr;
            row.wheel_lift = ts.f_z.lift;
        } else {
            // loads the reference planner's motion would imply
            const auto fz = vertical_forces(acc.a_x, acc.a_y, vehicle);
            row.f_z[0] = fz.fl;
            row.f_z[1] = fz.fr;
            row.f_z[2] = fz.rl;
            row.f_z[3] = fz.rr;
            row.wheel_lift = fz.lift;
        }

        const double s_now = plant.x[static_cast<std::size_t>(lay.s)];
        const double y_now = plant.x[static_cast<std::size_t>(lay.y_e)];
        const double xt_now = plant.x[static_cast<std::size_t>(lay.x_t)];
        for (const Obstacle& ob : scenario.obstacles) {
            row.collision_residuals.push_back(
                collision_residual(s_now, y_now, 0.0, ob, xt_now, scenario.t_s, ocp.y_e_buffer));
            const auto pos = propagate_obstacle(ob, xt_now);
            const double dist = std::hypot(s_now - pos.s, y_now - pos.y_e);
            row.min_obstacle_distance = std::min(row.min_obstacle_distance, dist);
        }
        const GlobalPose pose = scenario.road->frenet_to_global(
            std::min(s_now, scenario.road->length()), y_now,
            plant.x[static_cast<std::size_t>(lay.psi_e)]);
        row.x_global = pose.x;
        row.y_global = pose.y;
        row.psi_global = pose.psi;
        log.rows.push_back(std::move(row));

        plant_advance(plant_ctx, plant, u0, scenario.t_s, solver_cfg.plant_substeps);
        u_prev = u0;
        prev_traj = traj;
        have_prev = true;
    }
    return log;
}

namespace {

double yaw_rate_of(const LogRow& row, ModelKind kind) {
    switch (kind) {
        case ModelKind::particle: return row.control[1];
        case ModelKind::kinematic: return row.state[7];
        case ModelKind::double_track: return row.state[2];
    }
    return 0.0;
}

double steer_of(const LogRow& row, ModelKind kind) {
    switch (kind) {
        case ModelKind::particle: return 0.0;
        case ModelKind::kinematic: return row.state[6];
        case ModelKind::double_track: return row.control[0];
    }
    return 0.0;
}

double rms(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (const double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

MetricsReport compute_metrics(const std::vector<TrajectoryLog>& logs) {
    MetricsReport report;
    if (logs.empty()) return report;
    report.scenario = logs.front().scenario;
    for (const auto& log : logs) {
        if (log.scenario != report.scenario) {
            throw std::invalid_argument("compute_metrics: logs from different scenarios");
        }
    }
    const TrajectoryLog* reference = nullptr;
    for (const auto& log : logs) {
        if (log.kind == ModelKind::double_track &&
            (reference == nullptr || std::abs(log.hcg_scale - 1.0) <
                                         std::abs(reference->hcg_scale - 1.0))) {
            reference = &log;
        }
    }
    for (const auto& log : logs) {
        PlannerMetrics m;
        m.planner = to_string(log.kind);
        m.run_label = log.run_label;
        m.steps = static_cast<int>(log.rows.size());
        double sum_t = 0.0, sum_it = 0.0;
        for (const LogRow& row : log.rows) {
            sum_t += row.solve_time;
            sum_it += row.iterations;
            m.max_solve_time = std::max(m.max_solve_time, row.solve_time);
            m.peak_df_zf = std::max(m.peak_df_zf, std::abs(row.df_zf));
            m.peak_df_zr = std::max(m.peak_df_zr, std::abs(row.df_zr));
            for (const double a : row.alpha) m.peak_slip = std::max(m.peak_slip, std::abs(a));
            m.peak_yaw_rate = std::max(m.peak_yaw_rate, std::abs(yaw_rate_of(row, log.kind)));
            m.peak_steer = std::max(m.peak_steer, std::abs(steer_of(row, log.kind)));
            m.peak_a_y = std::max(m.peak_a_y, std::abs(row.a_y));
            m.min_clearance = std::min(m.min_clearance, row.min_obstacle_distance);
            for (const double r : row.collision_residuals) {
                m.min_collision_residual = std::min(m.min_collision_residual, r);
            }
        }
        if (!log.rows.empty()) {
            m.mean_solve_time = sum_t / static_cast<double>(log.rows.size());
            m.mean_iterations = sum_it / static_cast<double>(log.rows.size());
        }
        if (reference != nullptr) {
            const std::size_t n = std::min(log.rows.size(), reference->rows.size());
            std::vector<double> dy, dyaw, dv;
            dy.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                dy.push_back(log.rows[i].y_global - reference->rows[i].y_global);
                dyaw.push_back(yaw_rate_of(log.rows[i], log.kind) -
                               yaw_rate_of(reference->rows[i], reference->kind));
                dv.push_back(log.rows[i].state[0] - reference->rows[i].state[0]);
            }
            m.rms_y_vs_reference = rms(dy);
            m.rms_yaw_vs_reference = rms(dyaw);
            m.rms_speed_vs_reference = rms(dv);
        }
        report.rows.push_back(std::move(m));
    }
    return report;
}

ValidationReport validate_planner_model(const VehicleParams& vehicle,
                                        const ValidationOptions& options) {
    vehicle.validate();
    ValidationReport rep;

    double amp = 0.027;  // starting point near 0.3 g for the default SUV
    if (options.target_a_y <= 0.0) amp = 0.0;
    EightDofTrace trace;
    const auto steer = [&amp, &options](double t) {
        return amp * std::sin(2.0 * M_PI * options.frequency * t);
    };
    for (int attempt = 0; attempt < 6; ++attempt) {
        trace = simulate_8dof(vehicle, options.v0, options.duration, options.step, steer);
        double peak = 0.0;
        for (const auto& o : trace.outputs) peak = std::max(peak, std::abs(o.accel.a_y));
        rep.peak_a_y = peak;
        if (amp == 0.0 || peak <= 0.0) break;
        const double ratio = options.target_a_y / peak;
        if (std::abs(ratio - 1.0) < 0.03) break;
        amp *= ratio;
    }
    rep.amplitude = amp;

    // double-track planner model, open loop at the same fine step
    const int n = static_cast<int>(options.duration / options.step);
    ModelContext ctx{ModelKind::double_track, vehicle, nullptr, 0.0, 0.1, std::nullopt};
    std::array<double, kMaxStates> x{};
    x[0] = options.v0;
    BodyAccel lag{};
    std::vector<double> r_dt(static_cast<std::size_t>(n)), vy_dt(static_cast<std::size_t>(n)),
        vx_dt(static_cast<std::size_t>(n));
    std::vector<std::array<double, 4>> fz_dt(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = i * options.step;
        const std::array<double, kNumControls> u{steer(t), 0.0, 0.0};
        ctx.lagged_accel = lag;
        std::array<double, kMaxStates> dx{}, next{};
        model_rhs<double>(ctx, std::span<const double>(x.data(), 8), u,
                          std::span<double>(dx.data(), 8));
        rk4_model_step<double>(ctx, std::span<const double>(x.data(), 8), u, options.step,
                               std::span<double>(next.data(), 8));
        const auto fz = vertical_forces(lag.a_x, lag.a_y, vehicle);
        fz_dt[static_cast<std::size_t>(i)] = {fz.fl, fz.fr, fz.rl, fz.rr};
        r_dt[static_cast<std::size_t>(i)] = x[2];
        vy_dt[static_cast<std::size_t>(i)] = x[1];
        vx_dt[static_cast<std::size_t>(i)] = x[0];
        lag = BodyAccel{dx[0] - x[1] * x[2], dx[1] + x[0] * x[2]};
        x = next;
    }

    const std::size_t m = std::min(static_cast<std::size_t>(n), trace.state.size());
    auto rel_rms = [](const std::vector<double>& a, const std::vector<double>& b) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += (a[i] - b[i]) * (a[i] - b[i]);
            den += b[i] * b[i];
        }
        return std::sqrt(num) / std::max(std::sqrt(den), 1e-9);
    };
    std::vector<double> r8(m), vy8(m), vx8(m);
    for (std::size_t i = 0; i < m; ++i) {
        r8[i] = trace.state[i].psi_dot;
        vy8[i] = trace.state[i].v_y;
        vx8[i] = trace.state[i].v_x;
    }
    std::vector<double> rd(r_dt.begin(), r_dt.begin() + static_cast<long>(m));
    std::vector<double> vyd(vy_dt.begin(), vy_dt.begin() + static_cast<long>(m));
    std::vector<double> vxd(vx_dt.begin(), vx_dt.begin() + static_cast<long>(m));
    rep.rms_yaw_rate = rel_rms(rd, r8);
    rep.rms_v_y = rel_rms(vyd, vy8);
    rep.rms_v_x = rel_rms(vxd, vx8);
    double peak_dev = 0.0;
    for (std::size_t i = 0; i < m; ++i) peak_dev = std::max(peak_dev, std::abs(rd[i] - r8[i]));
    rep.peak_yaw_rate_dev = peak_dev;

    double worst_fz = 0.0;
    for (int wheel = 0; wheel < 4; ++wheel) {
        std::vector<double> a(m), b(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = fz_dt[i][static_cast<std::size_t>(wheel)];
            const auto& fz8 = trace.outputs[i].f_z;
            b[i] = wheel == 0 ? fz8.fl : wheel == 1 ? fz8.fr : wheel == 2 ? fz8.rl : fz8.rr;
        }
        worst_fz = std::max(worst_fz, rel_rms(a, b));
    }
    rep.rms_f_z = worst_fz;

    if (options.keep_traces) {
        rep.time.resize(m);
        for (std::size_t i = 0; i < m; ++i) rep.time[i] = static_cast<double>(i) * options.step;
        rep.yaw_rate_dt = rd;
        rep.yaw_rate_8dof = r8;
        rep.v_y_dt = vyd;
        rep.v_y_8dof = vy8;
    }
    return rep;
}

}  // namespace ltmpc
