#pragma once

#include <string>
#include <vector>

#include "ltmpc/sim.hpp"
#include "ltmpc/vehicle_params.hpp"

namespace ltmpc {

/// Loads vehicle parameters from a JSON document whose keys match the
/// VehicleParams field names; absent keys keep their defaults, unknown keys
/// are rejected. Validates before returning.
VehicleParams load_vehicle_params(const std::string& path);
VehicleParams vehicle_params_from_json(const std::string& text);
std::string vehicle_params_to_json(const VehicleParams& params);

/// Scenario from JSON: either {"name": "<builtin>"} plus optional overrides,
/// or a full description with road/obstacle arrays.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& text);

/// Whole experiment matrix executed by the `run` subcommand.
struct RunManifest {
    std::string scenario = "linear_n25";
    std::vector<std::string> scenarios;            ///< optional multi-scenario form
    std::vector<std::string> planners{"particle", "kinematic", "doubletrack"};
    std::string vehicle_file;                      ///< empty: built-in SUV defaults
    std::vector<double> hcg_scales{1.0};
    std::string out_dir = "out";
    int threads = 1;
    SolverConfig solver;
    double duration = -1.0;  ///< override scenario duration when positive
    int horizon = -1;        ///< override scenario horizon when positive

    void validate() const;
};

RunManifest load_manifest(const std::string& path);
RunManifest manifest_from_json(const std::string& text);
std::string manifest_to_json(const RunManifest& manifest);

}  // namespace ltmpc
