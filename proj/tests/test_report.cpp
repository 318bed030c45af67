#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ltmpc/config_io.hpp"
#include "ltmpc/report.hpp"
#include "ltmpc/svg_plot.hpp"
#include "ltmpc/trajectory_log.hpp"

using namespace ltmpc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("format_double round-trips arbitrary values") {
    for (double v : {0.0, 1.0 / 3.0, -2.5e-17, 6.62607015e-34, 22563.0, 1e308}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("csv columns map one-to-one onto the log fields") {
    const auto cols = csv_columns(ModelKind::double_track, 2);
    // 1 time + 8 states + 3 controls + 3 solve stats + 12 tire + 2 dFz + 3 global
    // + 2 accel + 2 residuals + distance + lift
    CHECK(cols.size() == 1u + 8u + 3u + 3u + 12u + 2u + 3u + 2u + 2u + 2u);
    TrajectoryLog log;
    log.kind = ModelKind::double_track;
    log.scenario = "linear_n25";
    log.obstacles.resize(2);
    LogRow row;
    row.time = 0.1;
    row.solve_status = "converged";
    row.collision_residuals = {1.5, 2.5};
    log.rows.push_back(row);
    std::ostringstream os;
    write_csv(log, os);
    std::istringstream is(os.str());
    std::string header, data;
    std::getline(is, header);
    std::getline(is, data);
    CHECK(std::count(header.begin(), header.end(), ',') ==
          std::count(data.begin(), data.end(), ','));
}

TEST_CASE("vehicle params json: defaults, overrides, unknown keys, invariants") {
    const VehicleParams p = vehicle_params_from_json("{\"m\": 2000.0}");
    CHECK(p.m == 2000.0);
    CHECK(p.I_z == VehicleParams{}.I_z);
    CHECK_THROWS(vehicle_params_from_json("{\"mass\": 2000.0}"));
    CHECK_THROWS(vehicle_params_from_json("{\"h_rc\": 2.0}"));  // above h_cg
    // round trip
    const VehicleParams q = vehicle_params_from_json(vehicle_params_to_json(p));
    CHECK(q.m == p.m);
    CHECK(q.c_b == p.c_b);
}

TEST_CASE("scenario json: built-in plus overrides") {
    const Scenario sc = scenario_from_json(
        "{\"name\": \"nonlinear_n13\", \"duration\": 5.0, "
        "\"obstacles\": [{\"s_0\": 80.0, \"half_width\": 1.2}]}");
    CHECK(sc.horizon == 13);
    CHECK(sc.duration == 5.0);
    REQUIRE(sc.obstacles.size() == 1);
    CHECK(sc.obstacles[0].s_0 == 80.0);
}

TEST_CASE("manifest json and validation errors") {
    const RunManifest m = manifest_from_json(
        "{\"scenario\": \"linear_n25\", \"planners\": [\"particle\"], "
        "\"hcg_scales\": [0.95, 1.05], \"threads\": 2}");
    CHECK(m.hcg_scales.size() == 2);
    CHECK(m.threads == 2);
    CHECK_THROWS(manifest_from_json("{\"planners\": [\"warp_drive\"]}"));
    CHECK_THROWS(manifest_from_json("{\"hcg_scales\": [-1.0]}"));
}

TEST_CASE("svg plot: axis ranges cover the data extents with a 5% margin") {
    SvgPlot plot("t", "x", "y");
    plot.add_line("a", {0.0, 10.0, 20.0}, {-1.0, 4.0, 1.0});
    const std::string svg = plot.render();
    std::smatch m;
    REQUIRE(std::regex_search(svg, m,
                              std::regex("data-xmin=\"([^\"]+)\" data-xmax=\"([^\"]+)\" "
                                         "data-ymin=\"([^\"]+)\" data-ymax=\"([^\"]+)\"")));
    CHECK(std::stod(m[1]) == doctest::Approx(-1.0));
    CHECK(std::stod(m[2]) == doctest::Approx(21.0));
    CHECK(std::stod(m[3]) == doctest::Approx(-1.25));
    CHECK(std::stod(m[4]) == doctest::Approx(4.25));
    // every emitted point stays inside the viewport
    std::regex num_re("points=\"([^\"]+)\"");
    REQUIRE(std::regex_search(svg, m, num_re));
    std::istringstream pts(m[1]);
    std::string pair;
    while (pts >> pair) {
        const auto comma = pair.find(',');
        const double px = std::stod(pair.substr(0, comma));
        const double py = std::stod(pair.substr(comma + 1));
        CHECK(px >= 0.0);
        CHECK(px <= 720.0);
        CHECK(py >= 0.0);
        CHECK(py <= 480.0);
    }
    // legend names each series
    CHECK(svg.find(">a</text>") != std::string::npos);
}

TEST_CASE("run_command: tiny manifest produces logs, metrics, plots, and is deterministic") {
    const fs::path dir_a = fresh_dir("ltmpc_test_run_a");
    const fs::path dir_b = fresh_dir("ltmpc_test_run_b");
    RunManifest m;
    m.scenario = "linear_n25";
    m.planners = {"particle", "kinematic"};
    m.hcg_scales = {1.0};
    m.duration = 1.0;
    m.threads = 2;
    std::ostringstream diag;
    m.out_dir = dir_a.string();
    REQUIRE(run_command(m, diag) == kExitOk);
    m.out_dir = dir_b.string();
    REQUIRE(run_command(m, diag) == kExitOk);

    int csv_count = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const std::string name = entry.path().filename().string();
        if (name.ends_with(".csv") && name != "metrics.csv" && name != "timings.csv") {
            ++csv_count;
            CHECK(slurp(entry.path()) == slurp(dir_b / name));
        }
    }
    CHECK(csv_count == 2);
    CHECK(slurp(dir_a / "metrics.csv") == slurp(dir_b / "metrics.csv"));
    CHECK(fs::exists(dir_a / "metrics.txt"));
    CHECK(fs::exists(dir_a / "timings.csv"));
    CHECK(fs::exists(dir_a / "trajectories_linear_n25.svg"));
    CHECK(fs::exists(dir_a / "load_transfer_linear_n25.svg"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("run_command: missing vehicle file yields a config error naming the path") {
    RunManifest m;
    m.vehicle_file = "/no/such/vehicle.json";
    std::ostringstream diag;
    CHECK(run_command(m, diag) == kExitConfigError);
    CHECK(diag.str().find("/no/such/vehicle.json") != std::string::npos);
}

TEST_CASE("validate_command: defaults pass, impossible threshold fails, bad config rejected") {
    const fs::path dir = fresh_dir("ltmpc_test_validate");
    std::ostringstream diag;
    CHECK(validate_command("", dir.string(), 0.10, diag) == kExitOk);
    CHECK(fs::exists(dir / "validation_yaw_rate.svg"));
    CHECK(validate_command("", dir.string(), 0.0, diag) == kExitValidationFailure);

    const fs::path bad = dir / "bad_vehicle.json";
    std::ofstream(bad) << "{\"h_cg\": 10.0}";  // violates the roll-stiffness invariant
    CHECK(validate_command(bad.string(), dir.string(), 0.10, diag) == kExitConfigError);
    fs::remove_all(dir);
}
