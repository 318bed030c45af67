#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>

#include "ltmpc/chassis.hpp"
#include "ltmpc/config_io.hpp"
#include "ltmpc/report.hpp"
#include "ltmpc/sim.hpp"
#include "ltmpc/tire.hpp"

namespace py = pybind11;
using namespace ltmpc;

namespace {

py::dict log_to_dict(const TrajectoryLog& log) {
    py::dict out;
    out["scenario"] = log.scenario;
    out["run_label"] = log.run_label;
    out["planner"] = to_string(log.kind);
    out["completed"] = log.completed;
    const std::size_t n = log.rows.size();
    std::vector<double> time(n), y_global(n), x_global(n), a_y(n), df_zf(n), df_zr(n), speed(n);
    std::vector<std::array<double, kMaxStates>> states(n);
    std::vector<std::array<double, kNumControls>> controls(n);
    std::vector<int> iterations(n);
    for (std::size_t i = 0; i < n; ++i) {
        const LogRow& r = log.rows[i];
        time[i] = r.time;
        x_global[i] = r.x_global;
        y_global[i] = r.y_global;
        a_y[i] = r.a_y;
        df_zf[i] = r.df_zf;
        df_zr[i] = r.df_zr;
        speed[i] = r.state[0];
        states[i] = r.state;
        controls[i] = r.control;
        iterations[i] = r.iterations;
    }
    out["time"] = time;
    out["x_global"] = x_global;
    out["y_global"] = y_global;
    out["a_y"] = a_y;
    out["df_zf"] = df_zf;
    out["df_zr"] = df_zr;
    out["speed"] = speed;
    out["states"] = states;
    out["controls"] = controls;
    out["iterations"] = iterations;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "NMPC motion-planner benchmark core";

    py::class_<VehicleParams>(m, "VehicleParams")
        .def(py::init<>())
        .def_readwrite("m", &VehicleParams::m)
        .def_readwrite("I_z", &VehicleParams::I_z)
        .def_readwrite("l_f", &VehicleParams::l_f)
        .def_readwrite("l_r", &VehicleParams::l_r)
        .def_readwrite("t_f", &VehicleParams::t_f)
        .def_readwrite("t_r", &VehicleParams::t_r)
        .def_readwrite("h_cg", &VehicleParams::h_cg)
        .def_readwrite("h_rc", &VehicleParams::h_rc)
        .def_readwrite("K_phi_f", &VehicleParams::K_phi_f)
        .def_readwrite("K_phi_r", &VehicleParams::K_phi_r)
        .def_readwrite("mu", &VehicleParams::mu)
        .def_readwrite("F_z0", &VehicleParams::F_z0)
        .def_readwrite("c_a", &VehicleParams::c_a)
        .def_readwrite("c_b", &VehicleParams::c_b)
        .def_readwrite("P_max", &VehicleParams::P_max)
        .def("validate", &VehicleParams::validate)
        .def("with_hcg_scale", &VehicleParams::with_hcg_scale);

    m.def("tire_lateral_force",
          [](double alpha, double f_z, const VehicleParams& p) {
              return tire_lateral_force(alpha, f_z, p);
          },
          py::arg("alpha"), py::arg("f_z"), py::arg("params") = VehicleParams{});
    m.def("roll_angle", &roll_angle, py::arg("a_y"), py::arg("params") = VehicleParams{});
    m.def("lateral_load_transfer",
          [](double a_y, const VehicleParams& p) {
              const auto lt = lateral_load_transfer(a_y, p);
              return std::make_pair(lt.front, lt.rear);
          },
          py::arg("a_y"), py::arg("params") = VehicleParams{});
    m.def("vertical_forces",
          [](double a_x, double a_y, const VehicleParams& p) {
              const auto f = vertical_forces(a_x, a_y, p);
              return py::make_tuple(f.fr, f.fl, f.rr, f.rl);
          },
          py::arg("a_x"), py::arg("a_y"), py::arg("params") = VehicleParams{},
          "Vertical loads (fr, fl, rr, rl); positive a_y loads the right side");
    m.def("slip_angles",
          [](double v_x, double v_y, double yaw_rate, double delta, const VehicleParams& p) {
              const auto a = slip_angles(v_x, v_y, yaw_rate, delta, p);
              return py::make_tuple(a.fl, a.fr, a.rl, a.rr);
          },
          py::arg("v_x"), py::arg("v_y"), py::arg("yaw_rate"), py::arg("delta"),
          py::arg("params") = VehicleParams{});

    m.def("scenario_names", &scenario_names);
    m.def("run_scenario",
          [](const std::string& scenario, const std::string& planner, double hcg_scale,
             double duration, const VehicleParams& vehicle) {
              Scenario sc = build_scenario(scenario);
              if (duration > 0.0) sc.duration = duration;
              HarnessSolverConfig cfg;
              TrajectoryLog log = run_receding_horizon(sc, model_kind_from_string(planner),
                                                       vehicle.with_hcg_scale(hcg_scale), cfg);
              log.hcg_scale = hcg_scale;
              return log_to_dict(log);
          },
          py::arg("scenario"), py::arg("planner"), py::arg("hcg_scale") = 1.0,
          py::arg("duration") = -1.0, py::arg("vehicle") = VehicleParams{},
          "Closed-loop receding-horizon run; returns the log as plain lists");
    m.def("validate_planner_model",
          [](const VehicleParams& vehicle, double target_a_y) {
              ValidationOptions opts;
              if (target_a_y > 0.0) opts.target_a_y = target_a_y;
              const ValidationReport rep = validate_planner_model(vehicle, opts);
              py::dict out;
              out["amplitude"] = rep.amplitude;
              out["peak_a_y"] = rep.peak_a_y;
              out["rms_yaw_rate"] = rep.rms_yaw_rate;
              out["rms_v_y"] = rep.rms_v_y;
              out["rms_v_x"] = rep.rms_v_x;
              out["rms_f_z"] = rep.rms_f_z;
              return out;
          },
          py::arg("vehicle") = VehicleParams{}, py::arg("target_a_y") = -1.0,
          "Sine-steer comparison against the 8DOF reference model");
    m.def("vehicle_params_from_json", &vehicle_params_from_json);
    m.def("vehicle_params_to_json", &vehicle_params_to_json);
}
