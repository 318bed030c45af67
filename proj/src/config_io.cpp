#include "ltmpc/config_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ltmpc {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("parse error in " + path + ": " + e.what());
    }
    return j;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
}

void read_vehicle(const json& j, VehicleParams& p) {
    static const std::vector<std::pair<std::string, double VehicleParams::*>> fields = {
        {"m", &VehicleParams::m},
        {"I_z", &VehicleParams::I_z},
        {"l_f", &VehicleParams::l_f},
        {"l_r", &VehicleParams::l_r},
        {"t_f", &VehicleParams::t_f},
        {"t_r", &VehicleParams::t_r},
        {"h_cg", &VehicleParams::h_cg},
        {"h_rc", &VehicleParams::h_rc},
        {"K_phi_f", &VehicleParams::K_phi_f},
        {"K_phi_r", &VehicleParams::K_phi_r},
        {"mu", &VehicleParams::mu},
        {"F_z0", &VehicleParams::F_z0},
        {"c_a", &VehicleParams::c_a},
        {"c_b", &VehicleParams::c_b},
        {"P_max", &VehicleParams::P_max},
        {"delta_min", &VehicleParams::delta_min},
        {"delta_max", &VehicleParams::delta_max},
        {"ddelta_min", &VehicleParams::ddelta_min},
        {"ddelta_max", &VehicleParams::ddelta_max},
        {"I_roll", &VehicleParams::I_roll},
        {"c_roll", &VehicleParams::c_roll},
        {"wheel_radius", &VehicleParams::wheel_radius},
        {"wheel_inertia", &VehicleParams::wheel_inertia},
        {"slip_stiffness", &VehicleParams::slip_stiffness},
    };
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& [name, member] : fields) {
            if (item.key() == name) {
                p.*member = item.value().get<double>();
                known = true;
                break;
            }
        }
        if (!known) throw std::runtime_error("unknown vehicle parameter: " + item.key());
    }
    p.validate();
}

Obstacle read_obstacle(const json& j) {
    Obstacle ob;
    ob.s_0 = j.value("s_0", ob.s_0);
    ob.y_e0 = j.value("y_e0", ob.y_e0);
    ob.v_t = j.value("v_t", ob.v_t);
    ob.v_n = j.value("v_n", ob.v_n);
    ob.a_t = j.value("a_t", ob.a_t);
    ob.a_n = j.value("a_n", ob.a_n);
    ob.half_length = j.value("half_length", ob.half_length);
    ob.half_width = j.value("half_width", ob.half_width);
    ob.validate();
    return ob;
}

Scenario read_scenario(const json& j) {
    Scenario sc = j.contains("name") ? build_scenario(j.at("name").get<std::string>())
                                     : build_scenario("linear_n25");
    if (j.contains("horizon")) sc.horizon = j.at("horizon").get<int>();
    if (j.contains("t_s")) sc.t_s = j.at("t_s").get<double>();
    if (j.contains("duration")) sc.duration = j.at("duration").get<double>();
    if (j.contains("v0")) sc.v0 = j.at("v0").get<double>();
    if (j.contains("y_e0")) sc.y_e0 = j.at("y_e0").get<double>();
    if (j.contains("v_ref")) sc.v_ref = j.at("v_ref").get<double>();
    if (j.contains("lane_lower")) sc.lane_lower = j.at("lane_lower").get<double>();
    if (j.contains("lane_upper")) sc.lane_upper = j.at("lane_upper").get<double>();
    if (j.contains("a_y_max")) {
        if (j.at("a_y_max").is_null()) {
            sc.a_y_max.reset();
        } else {
            sc.a_y_max = j.at("a_y_max").get<double>();
        }
    }
    if (j.contains("road_length") || j.contains("kappa")) {
        const double length = j.value("road_length", sc.road->length());
        const double kappa = j.value("kappa", 0.0);
        sc.road = std::make_shared<Road>(Road::constant_curvature(kappa, length, sc.lane_lower,
                                                                  sc.lane_upper, sc.v_ref));
    }
    if (j.contains("obstacles")) {
        sc.obstacles.clear();
        for (const auto& jo : j.at("obstacles")) sc.obstacles.push_back(read_obstacle(jo));
    }
    sc.validate();
    return sc;
}

void read_solver(const json& j, SolverConfig& cfg) {
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
    cfg.kkt_tolerance = j.value("kkt_tolerance", cfg.kkt_tolerance);
    cfg.mu_init = j.value("mu_init", cfg.mu_init);
    cfg.mu_reduction = j.value("mu_reduction", cfg.mu_reduction);
    cfg.mu_superlinear = j.value("mu_superlinear", cfg.mu_superlinear);
    cfg.armijo_c = j.value("armijo_c", cfg.armijo_c);
    cfg.backtrack_ratio = j.value("backtrack_ratio", cfg.backtrack_ratio);
    cfg.regularization_floor = j.value("regularization_floor", cfg.regularization_floor);
    if (j.contains("derivative_mode")) {
        const std::string mode = j.at("derivative_mode").get<std::string>();
        if (mode == "dual") {
            cfg.derivative_mode = DerivativeMode::dual_forward;
        } else if (mode == "finite_difference") {
            cfg.derivative_mode = DerivativeMode::finite_difference;
        } else {
            throw std::runtime_error("unknown derivative_mode: " + mode);
        }
    }
}

RunManifest read_manifest(const json& j) {
    RunManifest m;
    if (j.contains("scenario")) m.scenario = j.at("scenario").get<std::string>();
    if (j.contains("scenarios")) {
        m.scenarios = j.at("scenarios").get<std::vector<std::string>>();
    }
    if (j.contains("planners")) m.planners = j.at("planners").get<std::vector<std::string>>();
    m.vehicle_file = j.value("vehicle_file", m.vehicle_file);
    if (j.contains("hcg_scales")) m.hcg_scales = j.at("hcg_scales").get<std::vector<double>>();
    m.out_dir = j.value("out_dir", m.out_dir);
    m.threads = j.value("threads", m.threads);
    m.duration = j.value("duration", m.duration);
    m.horizon = j.value("horizon", m.horizon);
    if (j.contains("solver")) read_solver(j.at("solver"), m.solver);
    m.validate();
    return m;
}

}  // namespace

VehicleParams load_vehicle_params(const std::string& path) {
    VehicleParams p;
    read_vehicle(parse_file(path), p);
    return p;
}

VehicleParams vehicle_params_from_json(const std::string& text) {
    VehicleParams p;
    read_vehicle(parse_text(text), p);
    return p;
}

std::string vehicle_params_to_json(const VehicleParams& p) {
    json j{{"m", p.m},
           {"I_z", p.I_z},
           {"l_f", p.l_f},
           {"l_r", p.l_r},
           {"t_f", p.t_f},
           {"t_r", p.t_r},
           {"h_cg", p.h_cg},
           {"h_rc", p.h_rc},
           {"K_phi_f", p.K_phi_f},
           {"K_phi_r", p.K_phi_r},
           {"mu", p.mu},
           {"F_z0", p.F_z0},
           {"c_a", p.c_a},
           {"c_b", p.c_b},
           {"P_max", p.P_max},
           {"delta_min", p.delta_min},
           {"delta_max", p.delta_max},
           {"ddelta_min", p.ddelta_min},
           {"ddelta_max", p.ddelta_max},
           {"I_roll", p.I_roll},
           {"c_roll", p.c_roll},
           {"wheel_radius", p.wheel_radius},
           {"wheel_inertia", p.wheel_inertia},
           {"slip_stiffness", p.slip_stiffness}};
    return j.dump(2);
}

Scenario load_scenario(const std::string& path) { return read_scenario(parse_file(path)); }

Scenario scenario_from_json(const std::string& text) { return read_scenario(parse_text(text)); }

void RunManifest::validate() const {
    for (const double s : hcg_scales) {
        if (s <= 0.0) throw std::runtime_error("hcg scale factors must be positive");
    }
    if (planners.empty()) throw std::runtime_error("manifest selects no planners");
    for (const auto& p : planners) model_kind_from_string(p);  // throws on unknown
    if (threads < 1) throw std::runtime_error("threads must be >= 1");
}

RunManifest load_manifest(const std::string& path) { return read_manifest(parse_file(path)); }

RunManifest manifest_from_json(const std::string& text) {
    return read_manifest(parse_text(text));
}

std::string manifest_to_json(const RunManifest& m) {
    json j{{"scenario", m.scenario},
           {"planners", m.planners},
           {"hcg_scales", m.hcg_scales},
           {"out_dir", m.out_dir},
           {"threads", m.threads}};
    if (!m.scenarios.empty()) j["scenarios"] = m.scenarios;
    if (!m.vehicle_file.empty()) j["vehicle_file"] = m.vehicle_file;
    if (m.duration > 0.0) j["duration"] = m.duration;
    if (m.horizon > 0) j["horizon"] = m.horizon;
    return j.dump(2);
}

}  // namespace ltmpc
