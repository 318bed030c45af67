#include "ltmpc/ocp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ltmpc/rk4.hpp"

namespace ltmpc {

CostWeights CostWeights::defaults(ModelKind kind) {
    CostWeights w;
    switch (kind) {
        case ModelKind::double_track:
            break;  // struct defaults
        case ModelKind::particle:
            w.r = {1.0, 50.0, 1.0};
            w.s = {1e-2, 1e-2, 1e-2};
            w.t_alpha = 0.0;
            break;
        case ModelKind::kinematic:
            w.r = {1.0, 10.0, 1.0};
            w.s = {1e-2, 1.0, 1e-2};
            w.t_alpha = 0.0;
            break;
    }
    return w;
}

void OcpSpec::validate() const {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (t_s <= 0.0) throw std::invalid_argument("sample time must be positive");
    if (lane_lower >= lane_upper) throw std::invalid_argument("lane bounds inverted");
    for (double v : weights.q) {
        if (v < 0.0) throw std::invalid_argument("cost weights must be nonnegative");
    }
    for (double v : weights.r) {
        if (v < 0.0) throw std::invalid_argument("cost weights must be nonnegative");
    }
    for (double v : weights.s) {
        if (v < 0.0) throw std::invalid_argument("cost weights must be nonnegative");
    }
    vehicle.validate();
    for (const auto& ob : obstacles) ob.validate();
}

Trajectory Trajectory::zero(ModelKind kind, int horizon) {
    Trajectory t;
    t.n_states = state_dim(kind);
    t.states.assign(static_cast<std::size_t>(horizon + 1), {});
    t.controls.assign(static_cast<std::size_t>(horizon), {});
    return t;
}

Trajectory shift_warm_start(const Trajectory& previous, int horizon) {
    if (static_cast<int>(previous.states.size()) != horizon + 1 ||
        static_cast<int>(previous.controls.size()) != horizon) {
        throw std::invalid_argument("shift_warm_start: trajectory does not match horizon");
    }
    Trajectory out = previous;
    for (int k = 0; k < horizon; ++k) out.states[static_cast<std::size_t>(k)] = previous.states[static_cast<std::size_t>(k + 1)];
    for (int k = 0; k + 1 < horizon; ++k) {
        out.controls[static_cast<std::size_t>(k)] = previous.controls[static_cast<std::size_t>(k + 1)];
    }
    // last entries keep the previous tail values
    return out;
}

Eigen::VectorXd pack(const Trajectory& traj) {
    const int nx = traj.n_states;
    const int n_nodes = static_cast<int>(traj.states.size());
    const int n_ctrl = static_cast<int>(traj.controls.size());
    Eigen::VectorXd z(n_nodes * nx + n_ctrl * kNumControls);
    for (int k = 0; k < n_nodes; ++k) {
        for (int i = 0; i < nx; ++i) z[k * nx + i] = traj.states[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    }
    const int off = n_nodes * nx;
    for (int k = 0; k < n_ctrl; ++k) {
        for (int i = 0; i < kNumControls; ++i) {
            z[off + k * kNumControls + i] = traj.controls[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        }
    }
    return z;
}

Trajectory unpack(const Eigen::VectorXd& z, ModelKind kind, int horizon) {
    Trajectory t = Trajectory::zero(kind, horizon);
    const int nx = t.n_states;
    if (z.size() != (horizon + 1) * nx + horizon * kNumControls) {
        throw std::invalid_argument("unpack: decision vector dimension mismatch");
    }
    for (int k = 0; k <= horizon; ++k) {
        for (int i = 0; i < nx; ++i) t.states[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = z[k * nx + i];
    }
    const int off = (horizon + 1) * nx;
    for (int k = 0; k < horizon; ++k) {
        for (int i = 0; i < kNumControls; ++i) {
            t.controls[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = z[off + k * kNumControls + i];
        }
    }
    return t;
}

namespace {

constexpr double kFrenetEps = 1e-3;

double v_floor(ModelKind kind) { return kind == ModelKind::double_track ? 0.5 : 0.1; }

template <class S>
struct QuasiAccel {
    S a_x, a_y;
};

template <class S>
QuasiAccel<S> quasi_static_accel(std::span<const S> x, std::span<const S> u,
                                 const VehicleParams& p) {
    return {u[1] / S(p.m), x[0] * x[2]};
}

/// slip hinge residuals sqrt(T)*max(0, |alpha_ij| - 1.75*alpha0_ij) at one
/// double-track node; wheels with (near) zero load contribute nothing
template <class S>
std::array<S, 4> slip_hinges(std::span<const S> x, std::span<const S> u, const VehicleParams& p,
                             double t_alpha) {
    using std::abs;
    std::array<S, 4> out{S(0.0), S(0.0), S(0.0), S(0.0)};
    if (t_alpha <= 0.0) return out;
    const auto acc = quasi_static_accel(x, u, p);
    const auto fz = vertical_forces_t(acc.a_x, acc.a_y, p);
    const auto alpha = slip_angles_t(x[0], x[1], x[2], u[0], p);
    const double sqrt_t = std::sqrt(t_alpha);
    const std::array<const S*, 4> fzs{&fz.fl, &fz.fr, &fz.rl, &fz.rr};
    const std::array<const S*, 4> als{&alpha.fl, &alpha.fr, &alpha.rl, &alpha.rr};
    for (int i = 0; i < 4; ++i) {
        const S& f_z = *fzs[static_cast<std::size_t>(i)];
        if (value_of(f_z) <= 1.0) continue;
        const S c_alpha = S(p.c_a) * f_z + S(p.c_b) * f_z * f_z;
        const S f_peak = (S(0.9) - S(0.182) * (f_z / S(p.F_z0) - S(1.0))) * S(p.mu) * f_z;
        const S alpha0 = f_peak / c_alpha;
        out[static_cast<std::size_t>(i)] =
            S(sqrt_t) * pos_part(abs(*als[static_cast<std::size_t>(i)]) - S(1.75) * alpha0);
    }
    return out;
}

// ---- general inequality rows ------------------------------------------------

enum class RowKind {
    power,           // (F_X*v_x)/P_max in [-1, 1]
    friction_front,  // ((mu Fzf)^2 - (fyf)^2 - (FX Fzf/mg)^2)/(mg)^2 >= 0
    friction_rear,
    steer_rate,      // (delta_k - delta_{k-1})/T_s in [dd_min, dd_max]
    particle_ay,     // v_t*psidot_p/g in [-b, b]
    ay_state,        // v*psi_dot/g at a node, in [-cap, cap]/g
    collision,       // ellipse residual >= margin
    frenet,          // y_e*kappa(s) <= 1 - eps
};

struct RowDef {
    RowKind kind;
    int k = 0;         // node or interval index
    int obstacle = 0;  // for collision rows
    double lb = -kInf;
    double ub = kInf;
};

std::vector<RowDef> build_rows(const OcpSpec& ocp) {
    std::vector<RowDef> rows;
    const int n = ocp.horizon;
    const double mu_g = ocp.vehicle.mu * kGravity;
    for (int k = 0; k < n; ++k) {
        switch (ocp.kind) {
            case ModelKind::double_track: {
                rows.push_back({RowKind::power, k, 0, -1.0, 1.0});
                rows.push_back({RowKind::friction_front, k, 0, 0.0, kInf});
                rows.push_back({RowKind::friction_rear, k, 0, 0.0, kInf});
                rows.push_back({RowKind::steer_rate, k, 0, ocp.vehicle.ddelta_min,
                                ocp.vehicle.ddelta_max});
                break;
            }
            case ModelKind::particle: {
                const double cap = ocp.a_y_max ? std::min(mu_g, *ocp.a_y_max) : mu_g;
                rows.push_back({RowKind::particle_ay, k, 0, -cap / kGravity, cap / kGravity});
                break;
            }
            case ModelKind::kinematic:
                break;
        }
    }
    for (int k = 1; k <= n; ++k) {
        for (int i = 0; i < static_cast<int>(ocp.obstacles.size()); ++i) {
            rows.push_back({RowKind::collision, k, i, ocp.collision_margin, kInf});
        }
        rows.push_back({RowKind::frenet, k, 0, -kInf, 1.0 - kFrenetEps});
        if (ocp.kind != ModelKind::particle) {
            const double cap = ocp.a_y_max ? std::min(mu_g, *ocp.a_y_max) : mu_g;
            rows.push_back({RowKind::ay_state, k, 0, -cap / kGravity, cap / kGravity});
        }
    }
    return rows;
}

// ---- transcription ----------------------------------------------------------

struct Transcription {
    OcpSpec ocp;
    std::array<double, kMaxStates> x0{};
    int nx = 0;
    int n = 0;  // horizon
    int n_dec = 0;
    int n_eq = 0;
    std::vector<RowDef> rows;
    ModelContext ctx;
    int n_res = 0;
    int hinge_rows_per_stage = 0;

    explicit Transcription(const OcpSpec& spec, std::span<const double> x_init) : ocp(spec) {
        ocp.validate();
        nx = state_dim(ocp.kind);
        n = ocp.horizon;
        if (static_cast<int>(x_init.size()) != nx) {
            throw std::invalid_argument("transcribe: x0 dimension mismatch");
        }
        for (int i = 0; i < nx; ++i) x0[static_cast<std::size_t>(i)] = x_init[static_cast<std::size_t>(i)];
        n_dec = (n + 1) * nx + n * kNumControls;
        n_eq = (n + 1) * nx;
        rows = build_rows(ocp);
        ctx = ModelContext{ocp.kind, ocp.vehicle, ocp.road.get(), 0.0, ocp.t_s, std::nullopt};
        hinge_rows_per_stage =
            (ocp.kind == ModelKind::double_track && ocp.weights.t_alpha > 0.0) ? 4 : 0;
        n_res = n * (9 + hinge_rows_per_stage) + 3;
    }

    int xi(int k) const { return k * nx; }
    int ui(int k) const { return (n + 1) * nx + k * kNumControls; }

    template <class S>
    std::array<S, kMaxStates> node_state(const Eigen::VectorXd& z, int k, int seed_from) const {
        std::array<S, kMaxStates> x{};
        for (int i = 0; i < nx; ++i) {
            const double v = z[xi(k) + i];
            if constexpr (std::is_same_v<S, Dual>) {
                x[static_cast<std::size_t>(i)] =
                    seed_from >= 0 ? Dual(v, nx + kNumControls, seed_from + i)
                                   : Dual::constant(v, 0);
            } else {
                x[static_cast<std::size_t>(i)] = v;
            }
        }
        return x;
    }

    template <class S>
    std::array<S, kNumControls> node_control(const Eigen::VectorXd& z, int k, int seed_from) const {
        std::array<S, kNumControls> u{};
        for (int i = 0; i < kNumControls; ++i) {
            const double v = z[ui(k) + i];
            if constexpr (std::is_same_v<S, Dual>) {
                u[static_cast<std::size_t>(i)] =
                    seed_from >= 0 ? Dual(v, nx + kNumControls, seed_from + i)
                                   : Dual::constant(v, 0);
            } else {
                u[static_cast<std::size_t>(i)] = v;
            }
        }
        return u;
    }

    // ---- equality constraints (initial condition + defects)

    Eigen::VectorXd eq(const Eigen::VectorXd& z) const {
        Eigen::VectorXd out(n_eq);
        for (int i = 0; i < nx; ++i) out[i] = z[xi(0) + i] - x0[static_cast<std::size_t>(i)];
        std::array<double, kMaxStates> next{};
        for (int k = 0; k < n; ++k) {
            const auto xk = node_state<double>(z, k, -1);
            const auto uk = node_control<double>(z, k, -1);
            rk4_model_step<double>(ctx, std::span<const double>(xk.data(), static_cast<std::size_t>(nx)),
                                   std::span<const double>(uk.data(), kNumControls), ocp.t_s,
                                   std::span<double>(next.data(), static_cast<std::size_t>(nx)));
            for (int i = 0; i < nx; ++i) {
                out[(k + 1) * nx + i] = z[xi(k + 1) + i] - next[static_cast<std::size_t>(i)];
            }
        }
        return out;
    }

    Eigen::MatrixXd eq_jac(const Eigen::VectorXd& z) const {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_eq, n_dec);
        jac.topLeftCorner(nx, nx).setIdentity();
        std::array<Dual, kMaxStates> next{};
        for (int k = 0; k < n; ++k) {
            const auto xk = node_state<Dual>(z, k, 0);
            const auto uk = node_control<Dual>(z, k, nx);
            rk4_model_step<Dual>(ctx, std::span<const Dual>(xk.data(), static_cast<std::size_t>(nx)),
                                 std::span<const Dual>(uk.data(), kNumControls), ocp.t_s,
                                 std::span<Dual>(next.data(), static_cast<std::size_t>(nx)));
            const int row0 = (k + 1) * nx;
            for (int i = 0; i < nx; ++i) {
                jac(row0 + i, xi(k + 1) + i) = 1.0;
                const Dual& di = next[static_cast<std::size_t>(i)];
                for (int j = 0; j < nx; ++j) jac(row0 + i, xi(k) + j) = -di.d[static_cast<std::size_t>(j)];
                for (int j = 0; j < kNumControls; ++j) {
                    jac(row0 + i, ui(k) + j) = -di.d[static_cast<std::size_t>(nx + j)];
                }
            }
        }
        return jac;
    }

    // ---- cost residuals

    std::array<double, 3> output_ref() const { return {0.0, ocp.v_ref, ocp.v_ref}; }

    template <class S>
    std::array<S, 3> outputs(const std::array<S, kMaxStates>& x) const {
        const StateLayout lay = state_layout(ocp.kind);
        const S& speed = x[static_cast<std::size_t>(lay.speed)];
        return {x[static_cast<std::size_t>(lay.y_e)], speed,
                speed - x[static_cast<std::size_t>(lay.zeta)]};
    }

    Eigen::VectorXd cost_residuals(const Eigen::VectorXd& z) const {
        Eigen::VectorXd res(n_res);
        const auto ref = output_ref();
        int at = 0;
        std::array<double, kNumControls> u_prev = ocp.u_prev;
        for (int k = 0; k < n; ++k) {
            const auto xk = node_state<double>(z, k, -1);
            const auto uk = node_control<double>(z, k, -1);
            const auto y = outputs<double>(xk);
            for (int i = 0; i < 3; ++i) {
                res[at++] = std::sqrt(ocp.weights.q[static_cast<std::size_t>(i)]) *
                            (y[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]);
            }
            for (int i = 0; i < 3; ++i) {
                res[at++] = std::sqrt(ocp.weights.r[static_cast<std::size_t>(i)]) *
                            (uk[static_cast<std::size_t>(i)] - u_prev[static_cast<std::size_t>(i)]);
            }
            for (int i = 0; i < 3; ++i) {
                res[at++] = std::sqrt(ocp.weights.s[static_cast<std::size_t>(i)]) *
                            uk[static_cast<std::size_t>(i)];
            }
            if (hinge_rows_per_stage > 0) {
                const auto hinges =
                    slip_hinges<double>(std::span<const double>(xk.data(), static_cast<std::size_t>(nx)),
                                        std::span<const double>(uk.data(), kNumControls),
                                        ocp.vehicle, ocp.weights.t_alpha);
                for (int i = 0; i < 4; ++i) res[at++] = hinges[static_cast<std::size_t>(i)];
            }
            u_prev = uk;
        }
        const auto xn = node_state<double>(z, n, -1);
        const auto y = outputs<double>(xn);
        for (int i = 0; i < 3; ++i) {
            res[at++] = std::sqrt(ocp.weights.q[static_cast<std::size_t>(i)]) *
                        (y[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]);
        }
        return res;
    }

    Eigen::MatrixXd cost_residual_jac(const Eigen::VectorXd& z) const {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_res, n_dec);
        const StateLayout lay = state_layout(ocp.kind);
        int at = 0;
        for (int k = 0; k < n; ++k) {
            // tracking rows are linear in the node state
            const double sq0 = std::sqrt(ocp.weights.q[0]);
            const double sq1 = std::sqrt(ocp.weights.q[1]);
            const double sq2 = std::sqrt(ocp.weights.q[2]);
            jac(at + 0, xi(k) + lay.y_e) = sq0;
            jac(at + 1, xi(k) + lay.speed) = sq1;
            jac(at + 2, xi(k) + lay.speed) = sq2;
            jac(at + 2, xi(k) + lay.zeta) = -sq2;
            at += 3;
            for (int i = 0; i < 3; ++i) {
                const double sr = std::sqrt(ocp.weights.r[static_cast<std::size_t>(i)]);
                jac(at, ui(k) + i) = sr;
                if (k > 0) jac(at, ui(k - 1) + i) = -sr;
                ++at;
            }
            for (int i = 0; i < 3; ++i) {
                jac(at++, ui(k) + i) = std::sqrt(ocp.weights.s[static_cast<std::size_t>(i)]);
            }
            if (hinge_rows_per_stage > 0) {
                const auto xk = node_state<Dual>(z, k, 0);
                const auto uk = node_control<Dual>(z, k, nx);
                const auto hinges =
                    slip_hinges<Dual>(std::span<const Dual>(xk.data(), static_cast<std::size_t>(nx)),
                                      std::span<const Dual>(uk.data(), kNumControls), ocp.vehicle,
                                      ocp.weights.t_alpha);
                for (int i = 0; i < 4; ++i) {
                    const Dual& h = hinges[static_cast<std::size_t>(i)];
                    for (int j = 0; j < nx; ++j) jac(at, xi(k) + j) = h.d[static_cast<std::size_t>(j)];
                    for (int j = 0; j < kNumControls; ++j) {
                        jac(at, ui(k) + j) = h.d[static_cast<std::size_t>(nx + j)];
                    }
                    ++at;
                }
            }
        }
        jac(at + 0, xi(n) + lay.y_e) = std::sqrt(ocp.weights.q[0]);
        jac(at + 1, xi(n) + lay.speed) = std::sqrt(ocp.weights.q[1]);
        jac(at + 2, xi(n) + lay.speed) = std::sqrt(ocp.weights.q[2]);
        jac(at + 2, xi(n) + lay.zeta) = -std::sqrt(ocp.weights.q[2]);
        return jac;
    }

    // ---- general inequality rows

    template <class S>
    S row_value(const RowDef& row, const std::array<S, kMaxStates>& x,
                const std::array<S, kNumControls>& u, const Eigen::VectorXd& z) const {
        const VehicleParams& p = ocp.vehicle;
        const StateLayout lay = state_layout(ocp.kind);
        switch (row.kind) {
            case RowKind::power:
                return u[1] * x[0] / S(p.P_max);
            case RowKind::friction_front:
            case RowKind::friction_rear: {
                const auto acc = quasi_static_accel(
                    std::span<const S>(x.data(), static_cast<std::size_t>(nx)),
                    std::span<const S>(u.data(), kNumControls), p);
                const auto fz = vertical_forces_t(acc.a_x, acc.a_y, p);
                const auto alpha = slip_angles_t(x[0], x[1], x[2], u[0], p);
                const double mg = p.weight();
                const bool front = row.kind == RowKind::friction_front;
                const S fz_axle = front ? fz.fl + fz.fr : fz.rl + fz.rr;
                const S fy = front
                                 ? tire_lateral_force(alpha.fl, fz.fl, p) +
                                       tire_lateral_force(alpha.fr, fz.fr, p)
                                 : tire_lateral_force(alpha.rl, fz.rl, p) +
                                       tire_lateral_force(alpha.rr, fz.rr, p);
                const S fx = u[1] * fz_axle / S(mg);
                const S lim = S(p.mu) * fz_axle;
                return (lim * lim - fy * fy - fx * fx) / S(mg * mg);
            }
            case RowKind::steer_rate: {
                const double prev =
                    row.k > 0 ? z[ui(row.k - 1) + 0] : ocp.u_prev[0];
                return (u[0] - S(prev)) / S(ocp.t_s);
            }
            case RowKind::particle_ay:
                return x[0] * u[1] / S(kGravity);
            case RowKind::ay_state:
                return x[static_cast<std::size_t>(lay.speed)] *
                       x[static_cast<std::size_t>(lay.yaw_rate)] / S(kGravity);
            case RowKind::collision: {
                const Obstacle& ob = ocp.obstacles[static_cast<std::size_t>(row.obstacle)];
                return collision_residual_t<S>(x[static_cast<std::size_t>(lay.s)],
                                               x[static_cast<std::size_t>(lay.y_e)],
                                               x[static_cast<std::size_t>(lay.zeta)], ob,
                                               x[static_cast<std::size_t>(lay.x_t)], ocp.t_s,
                                               ocp.y_e_buffer);
            }
            case RowKind::frenet: {
                const S kappa = ocp.road ? ocp.road->curvature(x[static_cast<std::size_t>(lay.s)])
                                         : S(0.0);
                return x[static_cast<std::size_t>(lay.y_e)] * kappa;
            }
        }
        throw std::logic_error("unknown row kind");
    }

    bool row_uses_control(const RowDef& row) const {
        switch (row.kind) {
            case RowKind::power:
            case RowKind::friction_front:
            case RowKind::friction_rear:
            case RowKind::steer_rate:
            case RowKind::particle_ay:
                return true;
            default:
                return false;
        }
    }

    Eigen::VectorXd ineq(const Eigen::VectorXd& z) const {
        Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const RowDef& row = rows[r];
            const auto x = node_state<double>(z, row.k, -1);
            std::array<double, kNumControls> u{};
            if (row_uses_control(row)) u = node_control<double>(z, row.k, -1);
            out[static_cast<Eigen::Index>(r)] = row_value<double>(row, x, u, z);
        }
        return out;
    }

    Eigen::MatrixXd ineq_jac(const Eigen::VectorXd& z) const {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n_dec);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const RowDef& row = rows[r];
            const auto x = node_state<Dual>(z, row.k, 0);
            std::array<Dual, kNumControls> u{};
            const bool with_u = row_uses_control(row);
            if (with_u) u = node_control<Dual>(z, row.k, nx);
            const Dual val = row_value<Dual>(row, x, u, z);
            const auto ri = static_cast<Eigen::Index>(r);
            for (int j = 0; j < nx; ++j) jac(ri, xi(row.k) + j) = val.d[static_cast<std::size_t>(j)];
            if (with_u) {
                for (int j = 0; j < kNumControls; ++j) {
                    jac(ri, ui(row.k) + j) = val.d[static_cast<std::size_t>(nx + j)];
                }
            }
            // steer-rate rows also touch the previous interval's steering
            if (row.kind == RowKind::steer_rate && row.k > 0) {
                jac(ri, ui(row.k - 1) + 0) = -1.0 / ocp.t_s;
            }
        }
        return jac;
    }

    // ---- Lagrangian constraint curvature
    //
    // sum_i lam_i * hess(defect_i) + sum_j lam_g_j * hess(row_j), built by
    // forward differences of the dual-exact gradient blocks over each row's
    // support. Rows with negligible multipliers are skipped.

    Eigen::MatrixXd constraint_curvature(const Eigen::VectorXd& z, const Eigen::VectorXd& lam,
                                         const Eigen::VectorXd& lam_g) const {
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n_dec, n_dec);
        const int nb = nx + kNumControls;
        constexpr double kStep = 1e-7;
        constexpr double kSkip = 1e-10;

        // defect blocks, one interval at a time
        std::array<Dual, kMaxStates> next{};
        Eigen::MatrixXd base(nx, nb), pert(nx, nb);
        for (int k = 0; k < n; ++k) {
            double weight = 0.0;
            for (int i = 0; i < nx; ++i) weight = std::max(weight, std::abs(lam[(k + 1) * nx + i]));
            if (weight < kSkip) continue;
            Eigen::VectorXd zp = z;
            auto block_jac = [&](Eigen::MatrixXd& out) {
                const auto xk = node_state<Dual>(zp, k, 0);
                const auto uk = node_control<Dual>(zp, k, nx);
                rk4_model_step<Dual>(ctx, std::span<const Dual>(xk.data(), static_cast<std::size_t>(nx)),
                                     std::span<const Dual>(uk.data(), kNumControls), ocp.t_s,
                                     std::span<Dual>(next.data(), static_cast<std::size_t>(nx)));
                for (int i = 0; i < nx; ++i) {
                    for (int j = 0; j < nb; ++j) {
                        out(i, j) = next[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(j)];
                    }
                }
            };
            block_jac(base);
            for (int d = 0; d < nb; ++d) {
                const int col = d < nx ? xi(k) + d : ui(k) + (d - nx);
                const double h = kStep * std::max(1.0, std::abs(z[col]));
                zp[col] = z[col] + h;
                block_jac(pert);
                zp[col] = z[col];
                // defect rows are x_{k+1} - step(x_k, u_k): curvature carries a minus
                for (int i = 0; i < nx; ++i) {
                    const double li = lam[(k + 1) * nx + i];
                    if (std::abs(li) < kSkip) continue;
                    for (int j = 0; j < nb; ++j) {
                        const int colj = j < nx ? xi(k) + j : ui(k) + (j - nx);
                        hess(colj, col) -= li * (pert(i, j) - base(i, j)) / h;
                    }
                }
            }
        }

        // general inequality rows
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double lg = lam_g[static_cast<Eigen::Index>(r)];
            if (std::abs(lg) < kSkip) continue;
            const RowDef& row = rows[r];
            if (row.kind == RowKind::steer_rate) continue;  // linear
            const bool with_u = row_uses_control(row);
            const int nd = with_u ? nb : nx;
            Eigen::VectorXd zp = z;
            Eigen::VectorXd grad0(nd), gradp(nd);
            auto row_grad = [&](Eigen::VectorXd& out) {
                const auto x = node_state<Dual>(zp, row.k, 0);
                std::array<Dual, kNumControls> u{};
                if (with_u) u = node_control<Dual>(zp, row.k, nx);
                const Dual val = row_value<Dual>(row, x, u, zp);
                for (int j = 0; j < nd; ++j) out[j] = val.d[static_cast<std::size_t>(j)];
            };
            row_grad(grad0);
            for (int d = 0; d < nd; ++d) {
                const int col = d < nx ? xi(row.k) + d : ui(row.k) + (d - nx);
                const double h = kStep * std::max(1.0, std::abs(z[col]));
                zp[col] = z[col] + h;
                row_grad(gradp);
                zp[col] = z[col];
                for (int j = 0; j < nd; ++j) {
                    const int colj = j < nx ? xi(row.k) + j : ui(row.k) + (j - nx);
                    hess(colj, col) += lg * (gradp[j] - grad0[j]) / h;
                }
            }
        }
        return hess;
    }

    // ---- variable boxes

    void fill_bounds(Eigen::VectorXd& lb, Eigen::VectorXd& ub) const {
        lb.setConstant(n_dec, -kInf);
        ub.setConstant(n_dec, kInf);
        const StateLayout lay = state_layout(ocp.kind);
        const VehicleParams& p = ocp.vehicle;
        const double mu_g = p.mu * kGravity;
        // node 0 is pinned by the initial-condition equality; boxes start at node 1
        for (int k = 1; k <= n; ++k) {
            lb[xi(k) + lay.y_e] = ocp.lane_lower;
            ub[xi(k) + lay.y_e] = ocp.lane_upper;
            lb[xi(k) + lay.zeta] = 0.0;
            lb[xi(k) + lay.speed] = v_floor(ocp.kind);
            if (ocp.kind == ModelKind::kinematic) {
                lb[xi(k) + lay.delta] = p.delta_min;
                ub[xi(k) + lay.delta] = p.delta_max;
            }
        }
        for (int k = 0; k < n; ++k) {
            switch (ocp.kind) {
                case ModelKind::particle:
                    lb[ui(k) + 0] = -mu_g;
                    ub[ui(k) + 0] = mu_g;
                    break;
                case ModelKind::kinematic:
                    lb[ui(k) + 0] = -mu_g;
                    ub[ui(k) + 0] = mu_g;
                    lb[ui(k) + 1] = p.ddelta_min;
                    ub[ui(k) + 1] = p.ddelta_max;
                    break;
                case ModelKind::double_track:
                    lb[ui(k) + 0] = p.delta_min;
                    ub[ui(k) + 0] = p.delta_max;
                    lb[ui(k) + 1] = -p.mu * p.weight();
                    ub[ui(k) + 1] = p.mu * p.weight();
                    break;
            }
            lb[ui(k) + 2] = -ocp.u_ca_max;
            ub[ui(k) + 2] = ocp.u_ca_max;
        }
    }
};

std::string row_name(const RowDef& row) {
    switch (row.kind) {
        case RowKind::power: return "power[" + std::to_string(row.k) + "]";
        case RowKind::friction_front: return "friction_f[" + std::to_string(row.k) + "]";
        case RowKind::friction_rear: return "friction_r[" + std::to_string(row.k) + "]";
        case RowKind::steer_rate: return "steer_rate[" + std::to_string(row.k) + "]";
        case RowKind::particle_ay: return "yawrate_ay[" + std::to_string(row.k) + "]";
        case RowKind::ay_state: return "ay[" + std::to_string(row.k) + "]";
        case RowKind::collision:
            return "collision[" + std::to_string(row.k) + "][ob" + std::to_string(row.obstacle) +
                   "]";
        case RowKind::frenet: return "frenet[" + std::to_string(row.k) + "]";
    }
    return "?";
}

}  // namespace

double stage_cost(std::span<const double> state, std::span<const double> input,
                  std::span<const double> prev_input, const OcpSpec& ocp) {
    const StateLayout lay = state_layout(ocp.kind);
    const std::array<double, 3> y{state[static_cast<std::size_t>(lay.y_e)],
                                  state[static_cast<std::size_t>(lay.speed)],
                                  state[static_cast<std::size_t>(lay.speed)] -
                                      state[static_cast<std::size_t>(lay.zeta)]};
    const std::array<double, 3> ref{0.0, ocp.v_ref, ocp.v_ref};
    double cost = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double ey = y[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)];
        const double du = input[static_cast<std::size_t>(i)] - prev_input[static_cast<std::size_t>(i)];
        cost += ocp.weights.q[static_cast<std::size_t>(i)] * ey * ey;
        cost += ocp.weights.r[static_cast<std::size_t>(i)] * du * du;
        cost += ocp.weights.s[static_cast<std::size_t>(i)] * input[static_cast<std::size_t>(i)] *
                input[static_cast<std::size_t>(i)];
    }
    if (ocp.kind == ModelKind::double_track && ocp.weights.t_alpha > 0.0) {
        const auto hinges = slip_hinges<double>(state, input, ocp.vehicle, ocp.weights.t_alpha);
        for (const double h : hinges) cost += h * h;
    }
    return cost;
}

double terminal_cost(std::span<const double> state, const OcpSpec& ocp) {
    const StateLayout lay = state_layout(ocp.kind);
    const std::array<double, 3> y{state[static_cast<std::size_t>(lay.y_e)],
                                  state[static_cast<std::size_t>(lay.speed)],
                                  state[static_cast<std::size_t>(lay.speed)] -
                                      state[static_cast<std::size_t>(lay.zeta)]};
    const std::array<double, 3> ref{0.0, ocp.v_ref, ocp.v_ref};
    double cost = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double e = y[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)];
        cost += ocp.weights.q[static_cast<std::size_t>(i)] * e * e;
    }
    return cost;
}

Trajectory rollout_guess(const OcpSpec& ocp, std::span<const double> x0) {
    const int nx = state_dim(ocp.kind);
    if (static_cast<int>(x0.size()) != nx) {
        throw std::invalid_argument("rollout_guess: x0 dimension mismatch");
    }
    Trajectory t = Trajectory::zero(ocp.kind, ocp.horizon);
    ModelContext ctx{ocp.kind, ocp.vehicle, ocp.road.get(), 0.0, ocp.t_s, std::nullopt};
    std::array<double, kMaxStates> x{};
    for (int i = 0; i < nx; ++i) x[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)];
    t.states[0] = x;
    std::array<double, kNumControls> u{};
    for (int k = 0; k < ocp.horizon; ++k) {
        std::array<double, kMaxStates> next{};
        rk4_model_step<double>(ctx, std::span<const double>(x.data(), static_cast<std::size_t>(nx)),
                               u, ocp.t_s, std::span<double>(next.data(), static_cast<std::size_t>(nx)));
        x = next;
        t.states[static_cast<std::size_t>(k + 1)] = x;
    }
    return t;
}

std::vector<std::string> inequality_row_names(const OcpSpec& ocp) {
    std::vector<std::string> names;
    for (const RowDef& row : build_rows(ocp)) names.push_back(row_name(row));
    return names;
}

NlpProblem transcribe(const OcpSpec& ocp, std::span<const double> x0, const Trajectory& guess) {
    if (static_cast<int>(guess.states.size()) != ocp.horizon + 1 ||
        static_cast<int>(guess.controls.size()) != ocp.horizon) {
        throw std::invalid_argument("transcribe: guess dimensions do not match horizon");
    }
    auto tr = std::make_shared<Transcription>(ocp, x0);
    NlpProblem p;
    p.n_dec = tr->n_dec;
    p.n_eq = tr->n_eq;
    p.n_ineq = static_cast<int>(tr->rows.size());
    p.n_res = tr->n_res;
    p.lb_x.resize(p.n_dec);
    p.ub_x.resize(p.n_dec);
    tr->fill_bounds(p.lb_x, p.ub_x);
    p.lb_g.resize(p.n_ineq);
    p.ub_g.resize(p.n_ineq);
    for (int r = 0; r < p.n_ineq; ++r) {
        p.lb_g[r] = tr->rows[static_cast<std::size_t>(r)].lb;
        p.ub_g[r] = tr->rows[static_cast<std::size_t>(r)].ub;
    }
    p.cost = [tr](const Eigen::VectorXd& z) { return tr->cost_residuals(z).squaredNorm(); };
    p.cost_residuals = [tr](const Eigen::VectorXd& z) { return tr->cost_residuals(z); };
    p.cost_residual_jac = [tr](const Eigen::VectorXd& z) { return tr->cost_residual_jac(z); };
    p.eq = [tr](const Eigen::VectorXd& z) { return tr->eq(z); };
    p.eq_jac = [tr](const Eigen::VectorXd& z) { return tr->eq_jac(z); };
    p.ineq = [tr](const Eigen::VectorXd& z) { return tr->ineq(z); };
    p.ineq_jac = [tr](const Eigen::VectorXd& z) { return tr->ineq_jac(z); };
    p.constraint_curvature = [tr](const Eigen::VectorXd& z, const Eigen::VectorXd& lam,
                                  const Eigen::VectorXd& lam_g) {
        return tr->constraint_curvature(z, lam, lam_g);
    };
    return p;
}

}  // namespace ltmpc
