#include "ltmpc/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ltmpc/svg_plot.hpp"

namespace ltmpc {

namespace fs = std::filesystem;

namespace {

std::string scale_label(double scale) {
    std::ostringstream os;
    os << "hcg" << std::setprecision(3) << scale;
    return os.str();
}

struct RunSpec {
    std::string scenario;
    ModelKind kind;
    double hcg_scale;
};

std::vector<double> column(const TrajectoryLog& log, double LogRow::*field) {
    std::vector<double> out;
    out.reserve(log.rows.size());
    for (const auto& row : log.rows) out.push_back(row.*field);
    return out;
}

std::vector<double> times(const TrajectoryLog& log) { return column(log, &LogRow::time); }

}  // namespace

void emit_plots(const std::vector<TrajectoryLog>& logs, const std::string& out_dir) {
    if (logs.empty()) throw std::invalid_argument("emit_plots: no logs");
    fs::create_directories(out_dir);
    const std::string scenario = logs.front().scenario;

    SvgPlot traj("Closed-loop paths (" + scenario + ")", "X [m]", "Y [m]");
    for (const auto& log : logs) {
        traj.add_line(log.run_label, column(log, &LogRow::x_global),
                      column(log, &LogRow::y_global));
    }
    if (!logs.front().rows.empty()) {
        for (const auto& ob : logs.front().obstacles) {
            if (std::abs(ob.v_t) < 1e-9 && std::abs(ob.v_n) < 1e-9) {
                traj.add_ellipse(ob.s_0, ob.y_e0, std::sqrt(2.0) * ob.half_length,
                                 std::sqrt(2.0) * ob.half_width, "obstacle");
            }
        }
    }
    traj.write_file(out_dir + "/trajectories_" + scenario + ".svg");

    SvgPlot states("Speed and yaw rate (" + scenario + ")", "t [s]", "v [m/s] / 10*psi_dot [rad/s]");
    for (const auto& log : logs) {
        std::vector<double> speed, yaw10;
        for (const auto& row : log.rows) {
            speed.push_back(row.state[0]);
            const double yaw = log.kind == ModelKind::particle  ? row.control[1]
                               : log.kind == ModelKind::kinematic ? row.state[7]
                                                                  : row.state[2];
            yaw10.push_back(10.0 * yaw);
        }
        states.add_line(log.run_label + " v", times(log), speed);
        states.add_line(log.run_label + " 10r", times(log), yaw10);
    }
    states.write_file(out_dir + "/states_" + scenario + ".svg");

    SvgPlot lt("Lateral load transfer (" + scenario + ")", "t [s]", "dF_z [N]");
    for (const auto& log : logs) {
        lt.add_line(log.run_label + " front", times(log), column(log, &LogRow::df_zf));
        lt.add_line(log.run_label + " rear", times(log), column(log, &LogRow::df_zr));
    }
    lt.write_file(out_dir + "/load_transfer_" + scenario + ".svg");

    SvgPlot tire("Lateral force vs slip (" + scenario + ")", "alpha [rad]", "f_y [N]");
    for (const auto& log : logs) {
        if (log.kind != ModelKind::double_track) continue;
        const char* names[4] = {"fl", "fr", "rl", "rr"};
        for (int w = 0; w < 4; ++w) {
            std::vector<double> a, f;
            for (const auto& row : log.rows) {
                a.push_back(row.alpha[w]);
                f.push_back(row.f_y[w]);
            }
            tire.add_scatter(log.run_label + " " + names[w], a, f);
        }
    }
    tire.write_file(out_dir + "/tire_forces_" + scenario + ".svg");
}

std::string metrics_table_text(const std::vector<MetricsReport>& reports) {
    std::ostringstream os;
    os << std::left;
    for (const auto& rep : reports) {
        os << "scenario: " << rep.scenario << '\n';
        os << std::setw(26) << "  run" << std::setw(11) << "peak|dFzf|" << std::setw(11)
           << "peak|dFzr|" << std::setw(11) << "peak|slip|" << std::setw(11) << "peak|yaw|"
           << std::setw(11) << "peak|steer" << std::setw(10) << "peak|ay|" << std::setw(11)
           << "clearance" << std::setw(9) << "rmsY" << '\n';
        for (const auto& m : rep.rows) {
            os << "  " << std::setw(24) << m.run_label << std::setw(11) << std::setprecision(4)
               << m.peak_df_zf << std::setw(11) << m.peak_df_zr << std::setw(11) << m.peak_slip
               << std::setw(11) << m.peak_yaw_rate << std::setw(11) << m.peak_steer
               << std::setw(10) << m.peak_a_y << std::setw(11) << m.min_clearance << std::setw(9)
               << m.rms_y_vs_reference << '\n';
        }
    }
    return os.str();
}

std::string metrics_table_csv(const std::vector<MetricsReport>& reports) {
    std::ostringstream os;
    os << "scenario,run,steps,peak_df_zf,peak_df_zr,peak_slip,peak_yaw_rate,peak_steer,peak_a_y,"
          "min_clearance,min_collision_residual,rms_y,rms_yaw,rms_speed,mean_iterations\n";
    for (const auto& rep : reports) {
        for (const auto& m : rep.rows) {
            os << rep.scenario << ',' << m.run_label << ',' << m.steps << ','
               << format_double(m.peak_df_zf) << ',' << format_double(m.peak_df_zr) << ','
               << format_double(m.peak_slip) << ',' << format_double(m.peak_yaw_rate) << ','
               << format_double(m.peak_steer) << ',' << format_double(m.peak_a_y) << ','
               << format_double(m.min_clearance) << ','
               << format_double(m.min_collision_residual) << ','
               << format_double(m.rms_y_vs_reference) << ','
               << format_double(m.rms_yaw_vs_reference) << ','
               << format_double(m.rms_speed_vs_reference) << ','
               << format_double(m.mean_iterations) << '\n';
        }
    }
    return os.str();
}

std::string timing_table_text(const std::vector<MetricsReport>& reports) {
    std::ostringstream os;
    os << std::left << "Average computation time per solve [s]\n";
    for (const auto& rep : reports) {
        for (const auto& m : rep.rows) {
            os << "  " << std::setw(14) << rep.scenario << std::setw(24) << m.run_label
               << std::setprecision(4) << std::fixed << m.mean_solve_time << "  (max "
               << m.max_solve_time << ")\n";
            os.unsetf(std::ios::fixed);
        }
    }
    return os.str();
}

int run_command(const RunManifest& manifest, std::ostream& diag) {
    VehicleParams vehicle;
    try {
        manifest.validate();
        if (!manifest.vehicle_file.empty()) vehicle = load_vehicle_params(manifest.vehicle_file);
        fs::create_directories(manifest.out_dir);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    std::vector<std::string> scenario_list =
        manifest.scenarios.empty() ? std::vector<std::string>{manifest.scenario}
                                   : manifest.scenarios;
    std::vector<RunSpec> specs;
    try {
        for (const auto& sc : scenario_list) {
            build_scenario(sc);  // fail fast on unknown names
            for (const auto& pl : manifest.planners) {
                for (const double scale : manifest.hcg_scales) {
                    specs.push_back({sc, model_kind_from_string(pl), scale});
                }
            }
        }
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    std::vector<TrajectoryLog> logs(specs.size());
    std::vector<std::string> errors(specs.size());
    std::mutex diag_mutex;
    std::size_t next = 0;
    std::mutex next_mutex;
    auto worker = [&]() {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= specs.size()) return;
                i = next++;
            }
            const RunSpec& spec = specs[i];
            try {
                Scenario sc = build_scenario(spec.scenario);
                if (manifest.duration > 0.0) sc.duration = manifest.duration;
                if (manifest.horizon > 0) sc.horizon = manifest.horizon;
                HarnessSolverConfig hcfg;
                hcfg.base = manifest.solver;
                TrajectoryLog log =
                    run_receding_horizon(sc, spec.kind, vehicle.with_hcg_scale(spec.hcg_scale),
                                         hcfg);
                log.hcg_scale = spec.hcg_scale;
                log.run_label = to_string(spec.kind) + "_" + scale_label(spec.hcg_scale);
                logs[i] = std::move(log);
                std::lock_guard<std::mutex> lock(diag_mutex);
                diag << "completed " << spec.scenario << " / " << logs[i].run_label
                     << (logs[i].completed ? "" : "  [TRUNCATED]") << '\n';
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n_threads = std::min<int>(manifest.threads, static_cast<int>(specs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    bool any_failed = false;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!errors[i].empty()) {
            diag << "error in " << specs[i].scenario << ": " << errors[i] << '\n';
            any_failed = true;
        } else if (!logs[i].completed) {
            diag << "run truncated: " << logs[i].failure_reason << '\n';
            any_failed = true;
        }
    }

    // write outputs grouped per scenario
    std::vector<MetricsReport> reports;
    for (const auto& sc : scenario_list) {
        std::vector<TrajectoryLog> group;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (specs[i].scenario == sc && errors[i].empty()) group.push_back(logs[i]);
        }
        if (group.empty()) continue;
        for (const auto& log : group) {
            write_csv_file(log, manifest.out_dir + "/" + sc + "_" + log.run_label + ".csv");
        }
        emit_plots(group, manifest.out_dir);
        reports.push_back(compute_metrics(group));
    }
    {
        std::ofstream os(manifest.out_dir + "/metrics.csv");
        os << metrics_table_csv(reports);
    }
    {
        std::ofstream os(manifest.out_dir + "/metrics.txt");
        os << metrics_table_text(reports) << '\n' << timing_table_text(reports);
    }
    {
        std::ofstream os(manifest.out_dir + "/timings.csv");
        std::vector<TrajectoryLog> all;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (errors[i].empty()) all.push_back(logs[i]);
        }
        std::vector<TrajectoryLog> prefixed;
        for (auto& log : all) {
            TrajectoryLog copy = log;
            copy.run_label = log.scenario + "_" + log.run_label;
            prefixed.push_back(std::move(copy));
        }
        write_timings_csv(prefixed, os);
    }
    diag << metrics_table_text(reports) << '\n' << timing_table_text(reports);
    return any_failed ? kExitRunFailure : kExitOk;
}

int validate_command(const std::string& vehicle_file, const std::string& out_dir, double threshold,
                     std::ostream& diag) {
    VehicleParams vehicle;
    try {
        if (!vehicle_file.empty()) vehicle = load_vehicle_params(vehicle_file);
        vehicle.validate();
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    ValidationOptions opts;
    opts.keep_traces = true;
    const ValidationReport rep = validate_planner_model(vehicle, opts);
    diag << "sine-steer validation (" << opts.frequency << " Hz, v0 " << opts.v0 << " m/s)\n"
         << "  amplitude        " << rep.amplitude << " rad (peak a_y " << rep.peak_a_y
         << " m/s^2)\n"
         << "  yaw-rate RMS dev " << 100.0 * rep.rms_yaw_rate << " %\n"
         << "  v_y RMS dev      " << 100.0 * rep.rms_v_y << " %\n"
         << "  v_x RMS dev      " << 100.0 * rep.rms_v_x << " %\n"
         << "  F_z RMS dev      " << 100.0 * rep.rms_f_z << " % (worst wheel)\n";

    SvgPlot plot("Planner model vs 8DOF reference, sine steer", "t [s]", "yaw rate [rad/s]");
    plot.add_line("planner model", rep.time, rep.yaw_rate_dt);
    plot.add_line("8dof reference", rep.time, rep.yaw_rate_8dof);
    plot.write_file(out_dir + "/validation_yaw_rate.svg");
    SvgPlot plot2("Planner model vs 8DOF reference, sine steer", "t [s]", "v_y [m/s]");
    plot2.add_line("planner model", rep.time, rep.v_y_dt);
    plot2.add_line("8dof reference", rep.time, rep.v_y_8dof);
    plot2.write_file(out_dir + "/validation_v_y.svg");

    if (rep.rms_yaw_rate <= threshold) return kExitOk;
    diag << "validation failed: yaw-rate RMS deviation " << 100.0 * rep.rms_yaw_rate
         << " % exceeds threshold " << 100.0 * threshold << " %\n";
    return kExitValidationFailure;
}

}  // namespace ltmpc
