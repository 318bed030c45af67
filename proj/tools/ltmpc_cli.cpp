#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltmpc/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"NMPC motion-planner benchmark: particle, kinematic and load-transfer-aware "
                 "double-track planners in collision-avoidance scenarios"};
    app.require_subcommand(1);

    // run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Execute an experiment matrix and write CSV/SVG outputs");
    std::string manifest_path;
    std::string out_dir;
    std::string planner;
    std::string scenario;
    std::vector<double> hcg_scales;
    int horizon = -1;
    int threads = -1;
    double duration = -1.0;
    unsigned seed = 0;
    run->add_option("--manifest", manifest_path, "Manifest JSON path");
    run->add_option("--out", out_dir, "Output directory (overrides manifest)");
    run->add_option("--planner", planner, "particle|kinematic|doubletrack|all");
    run->add_option("--scenario", scenario, "Scenario name (see list-scenarios)");
    run->add_option("--hcg-scale", hcg_scales, "CG height scale factor (repeatable)");
    run->add_option("--horizon", horizon, "Prediction horizon override");
    run->add_option("--threads", threads, "Worker threads for independent runs");
    run->add_option("--duration", duration, "Simulated duration override [s]");
    run->add_option("--seed", seed, "Reserved; the pipeline is deterministic");

    // validate ------------------------------------------------------------
    auto* validate = app.add_subcommand("validate",
                                        "Sine-steer comparison of the double-track planner model "
                                        "against the 8DOF reference");
    std::string vehicle_file;
    std::string val_out = "out";
    double threshold = 0.10;
    validate->add_option("vehicle", vehicle_file, "Vehicle parameter JSON (defaults when omitted)");
    validate->add_option("--out", val_out, "Output directory");
    validate->add_option("--threshold", threshold, "Yaw-rate RMS deviation gate (fraction)");

    // list-scenarios -------------------------------------------------------
    auto* list = app.add_subcommand("list-scenarios", "Print the built-in scenario names");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& name : ltmpc::scenario_names()) std::cout << name << '\n';
        return ltmpc::kExitOk;
    }

    if (validate->parsed()) {
        return ltmpc::validate_command(vehicle_file, val_out, threshold, std::cerr);
    }

    // run: flags > manifest > defaults
    ltmpc::RunManifest manifest;
    if (!manifest_path.empty()) {
        try {
            manifest = ltmpc::load_manifest(manifest_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return ltmpc::kExitConfigError;
        }
    }
    if (!out_dir.empty()) manifest.out_dir = out_dir;
    if (!scenario.empty()) {
        manifest.scenario = scenario;
        manifest.scenarios.clear();
    }
    if (!planner.empty()) {
        if (planner == "all") {
            manifest.planners = {"particle", "kinematic", "doubletrack"};
        } else {
            manifest.planners = {planner};
        }
    }
    if (!hcg_scales.empty()) manifest.hcg_scales = hcg_scales;
    if (horizon > 0) manifest.horizon = horizon;
    if (threads > 0) manifest.threads = threads;
    if (duration > 0.0) manifest.duration = duration;
    return ltmpc::run_command(manifest, std::cerr);
}
