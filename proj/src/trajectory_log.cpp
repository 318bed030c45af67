#include "ltmpc/trajectory_log.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace ltmpc {

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::vector<std::string> state_columns(ModelKind kind) {
    switch (kind) {
        case ModelKind::particle:
            return {"v_t", "psi_e", "y_e", "s", "x_t", "zeta_ca"};
        case ModelKind::kinematic:
            return {"v", "psi_e", "y_e", "s", "x_t", "beta", "delta", "psi_dot", "zeta_ca"};
        case ModelKind::double_track:
            return {"v_x", "v_y", "psi_dot", "psi_e", "y_e", "s", "x_t", "zeta_ca"};
    }
    return {};
}

std::vector<std::string> control_columns(ModelKind kind) {
    switch (kind) {
        case ModelKind::particle: return {"u_a_t", "u_psi_dot_p", "u_ca"};
        case ModelKind::kinematic: return {"u_accel", "u_delta_rate", "u_ca"};
        case ModelKind::double_track: return {"u_delta", "u_f_x", "u_ca"};
    }
    return {};
}

}  // namespace

std::vector<std::string> csv_columns(ModelKind kind, std::size_t n_obstacles) {
    std::vector<std::string> cols{"time"};
    for (auto& c : state_columns(kind)) cols.push_back(c);
    for (auto& c : control_columns(kind)) cols.push_back(c);
    cols.insert(cols.end(), {"iterations", "solve_status", "kkt_residual"});
    cols.insert(cols.end(), {"f_zfl", "f_zfr", "f_zrl", "f_zrr"});
    cols.insert(cols.end(), {"alpha_fl", "alpha_fr", "alpha_rl", "alpha_rr"});
    cols.insert(cols.end(), {"f_yfl", "f_yfr", "f_yrl", "f_yrr"});
    cols.insert(cols.end(), {"df_zf", "df_zr", "x_global", "y_global", "psi_global", "a_x", "a_y"});
    for (std::size_t i = 0; i < n_obstacles; ++i) {
        cols.push_back("collision_residual_" + std::to_string(i));
    }
    cols.insert(cols.end(), {"min_obstacle_distance", "wheel_lift"});
    return cols;
}

void write_csv(const TrajectoryLog& log, std::ostream& os) {
    const auto cols = csv_columns(log.kind, log.obstacles.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    }
    const int nx = state_dim(log.kind);
    for (const LogRow& row : log.rows) {
        os << format_double(row.time);
        for (int i = 0; i < nx; ++i) os << ',' << format_double(row.state[static_cast<std::size_t>(i)]);
        for (int i = 0; i < kNumControls; ++i) {
            os << ',' << format_double(row.control[static_cast<std::size_t>(i)]);
        }
        os << ',' << row.iterations << ',' << row.solve_status << ','
           << format_double(row.kkt_residual);
        for (const double v : row.f_z) os << ',' << format_double(v);
        for (const double v : row.alpha) os << ',' << format_double(v);
        for (const double v : row.f_y) os << ',' << format_double(v);
        os << ',' << format_double(row.df_zf) << ',' << format_double(row.df_zr);
        os << ',' << format_double(row.x_global) << ',' << format_double(row.y_global) << ','
           << format_double(row.psi_global);
        os << ',' << format_double(row.a_x) << ',' << format_double(row.a_y);
        for (const double v : row.collision_residuals) os << ',' << format_double(v);
        os << ',' << format_double(row.min_obstacle_distance) << ',' << (row.wheel_lift ? 1 : 0)
           << '\n';
    }
}

void write_csv_file(const TrajectoryLog& log, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(log, os);
}

void write_timings_csv(const std::vector<TrajectoryLog>& logs, std::ostream& os) {
    os << "run,step,solve_time\n";
    for (const TrajectoryLog& log : logs) {
        for (std::size_t i = 0; i < log.rows.size(); ++i) {
            os << log.run_label << ',' << i << ',' << format_double(log.rows[i].solve_time)
               << '\n';
        }
    }
}

}  // namespace ltmpc
