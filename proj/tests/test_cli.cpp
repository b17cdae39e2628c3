#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drcbf/runner.hpp"
#include "support.hpp"

using namespace drcbf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("drcbf_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_path(const std::string& name) { return std::string(DRCBF_CONFIG_DIR) + "/" + name; }

int run_cli(const std::string& args)
{
    const int status = std::system((std::string(DRCBF_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_path(const json& doc)
{
    try {
        parse_run_config(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

}  // namespace

TEST_CASE("empty document gives the benchmark defaults")
{
    const auto config = parse_run_config(json::object());
    const auto& s = config.scenario;
    CHECK(s.params.mass == 1650.0);
    CHECK(s.controller == BarrierMode::drcbf);
    CHECK(s.params.k == std::vector<double>{0.1, 0.1});
    CHECK(s.horizon == 30.0);
    CHECK(s.control_period == 1e-3);
    CHECK(config.output_dir == "out");
}

TEST_CASE("schema errors carry the offending path")
{
    CHECK(error_path(json{{"controller", {{"bogus", 1}}}}) == "controller.bogus");
    CHECK(error_path(json{{"modle", json::object()}}) == "modle");
    CHECK(error_path(json{{"controller", {{"poles", {5.0, "x"}}}}}) == "controller.poles[1]");
    CHECK(error_path(json{{"controller", {{"poles", {5.0, -1.0}}}}}) == "controller.poles[1]");
    CHECK(error_path(json{{"controller", {{"type", "mpc"}}}}) == "controller.type");
    CHECK(error_path(json{{"model", {{"mass", -2.0}}}}) == "model.mass");
    CHECK(error_path(json{{"controller", {{"k", "best"}}}}) == "controller.k");
    CHECK(error_path(json{{"disturbance", {{"d_u", {{{"type", "uniform_noise"}, {"low", 1.0}, {"high", 0.0}}}}}}}) ==
          "disturbance.d_u[0].low");
    CHECK(error_path(json{{"simulation", {{"horizon", 0.0}}}}) == "simulation.horizon");
    CHECK(error_path(json::array()) == "<root>");
    CHECK_THROWS_AS(parse_run_config(json::array()), ConfigError);
}

TEST_CASE("scalar broadcast and symbolic values")
{
    const auto config = parse_run_config(json{{"controller", {{"r", 100}, {"k", "optimal"}, {"eta", 1.0}}}});
    CHECK(config.scenario.params.r == std::vector<double>{100.0, 100.0});
    CHECK(config.scenario.optimal_k);
    CHECK(config.scenario.eta == std::vector<double>{1.0, 1.0});
}

TEST_CASE("config round trip")
{
    for (int id : {1, 2, 3}) {
        RunConfig config;
        config.scenario = case_scenario(id, "adrcbf");
        config.output_dir = "elsewhere";
        const auto doc = to_json(config);
        CHECK(to_json(parse_run_config(doc)) == doc);
        const auto file = parse_run_config(load_json_file(config_path("case" + std::to_string(id) + ".json")));
        CHECK(file.scenario.resolved_bound() == doctest::Approx(config.scenario.resolved_bound()).epsilon(1e-15));
    }
}

TEST_CASE("dotted overrides")
{
    auto doc = load_json_file(config_path("case1.json"));
    set_config_value(doc, "controller.k_multiplier", 20.0);
    set_config_value(doc, "controller.poles[0]", 3.0);
    set_config_value(doc, "simulation.horizon", parse_scalar("5"));
    const auto config = parse_run_config(doc);
    CHECK(config.scenario.k_multiplier == 20.0);
    CHECK(config.scenario.params.poles == std::vector<double>{3.0, 10.0});
    CHECK(config.scenario.horizon == 5.0);

    const auto before = doc;
    CHECK_THROWS_AS(set_config_value(doc, "controller.nope", 1.0), ConfigError);
    CHECK_THROWS_AS(set_config_value(doc, "controller.poles[0]", -1.0), ConfigError);
    CHECK(doc == before);

    CHECK(parse_scalar("0.5") == json(0.5));
    CHECK(parse_scalar("true") == json(true));
    CHECK(parse_scalar("7") == json(7));
    CHECK(parse_scalar("adrcbf") == json("adrcbf"));
}

TEST_CASE("CSV round trip is exact and the summary agrees with it")
{
    auto s = case_scenario(2, "adrcbf");
    s.horizon = 3.0;
    const auto log = run_simulation(build_simulation(s));
    std::stringstream csv;
    write_trajectory_csv(csv, log, 2);
    const auto table = read_csv(csv);
    REQUIRE(table.rows.size() == log.steps.size());
    const auto D = table.numbers("D"), v = table.numbers("v_f"), u = table.numbers("u"), du = table.numbers("d_u");
    const auto phi1 = table.numbers("phi_1");
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
        CHECK(D[i] == log.steps[i].x[0]);
        CHECK(v[i] == log.steps[i].x[1]);
        CHECK(u[i] == log.steps[i].u[0]);
        CHECK(du[i] == log.steps[i].d[0]);
        CHECK(phi1[i] == log.steps[i].levels[1]);
    }
    const auto summary = summarize(log, s.params.min_distance, s.horizon, 0.0);
    CHECK(summary.min_distance == *std::min_element(D.begin(), D.end()));
    CHECK(summary.steps == log.steps.size());
    CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("run artifacts")
{
    const auto dir = scratch("artifacts");
    RunConfig config;
    config.scenario = case_scenario(1, "drcbf");
    config.scenario.horizon = 2.0;
    config.output_dir = dir.string();
    const auto outcome = execute_run(config);
    for (const char* f : {"trajectory.csv", "summary.json", "speed.svg", "distance.svg"}) CHECK(fs::exists(dir / f));
    const auto summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("min_distance").get<double>() == outcome.summary.min_distance);
    CHECK(summary.at("metadata").at("seed") == json("1"));
    const auto svg = slurp(dir / "distance.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("single-value sweep reproduces a plain run")
{
    const auto dir = scratch("sweep");
    auto doc = load_json_file(config_path("case3.json"));
    set_config_value(doc, "simulation.horizon", 3.0);
    set_config_value(doc, "output.dir", (dir / "run").string());
    const auto plain = execute_run(parse_run_config(doc));

    set_config_value(doc, "output.dir", (dir / "sweep").string());
    const auto entries = execute_sweep(doc, "controller.k_multiplier", {json(1.0)}, 1);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].summary.min_distance == plain.summary.min_distance);
    CHECK(slurp(fs::path(entries[0].dir) / "trajectory.csv") == slurp(dir / "run" / "trajectory.csv"));
    CHECK(fs::exists(dir / "sweep" / "comparison.csv"));

    CHECK_THROWS_AS(execute_sweep(doc, "controller.nope", {json(1.0)}, 1), ConfigError);
    CHECK_THROWS_AS(execute_sweep(doc, "controller.k_multiplier", {json(1.0), json(-1.0)}, 1), ConfigError);
}

TEST_CASE("without disturbance channels the robust chain reduces to the nominal one")
{
    auto doc = load_json_file(config_path("zero_disturbance.json"));
    set_config_value(doc, "output.plots", false);
    const auto robust = execute_run(parse_run_config(doc), false);
    set_config_value(doc, "controller.type", "hocbf");
    const auto nominal = execute_run(parse_run_config(doc), false);
    REQUIRE(robust.log.steps.size() == nominal.log.steps.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < robust.log.steps.size(); ++i) {
        worst = std::max(worst, (robust.log.steps[i].x - nominal.log.steps[i].x).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(robust.log.steps[i].u[0] - nominal.log.steps[i].u[0]) /
                                    std::max(1.0, std::abs(nominal.log.steps[i].u[0])));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("command-line exit codes")
{
    const auto dir = scratch("cli");
    const std::string out = " --out " + (dir / "o").string();
    CHECK(run_cli("run " + config_path("case1.json") + " --controller hocbf" + out) == 2);
    CHECK(run_cli("run " + config_path("case1.json") + " --controller adrcbf --horizon 2" + out) == 0);
    CHECK(run_cli("run " + config_path("case1.json") + " --set controller.bogus=1" + out) == 1);
    CHECK(run_cli("run " + config_path("case1.json") + " --seed 4 --horizon 1" + out) == 0);
    CHECK(run_cli("sweep " + config_path("case1.json") +
                  " --param controller.r --values 1,100 --horizon 1 --threads 2" + out) != 0);  // --horizon is run-only
    CHECK(run_cli("sweep " + config_path("case1.json") + " --param controller.r --values 1,100" +
                  " --set simulation.horizon=1 --threads 2" + out) == 0);
    CHECK(fs::exists(dir / "o" / "comparison.csv"));
    CHECK(run_cli("export-case 3 --out " + (dir / "c3.json").string()) == 0);
    CHECK(parse_run_config(load_json_file((dir / "c3.json").string())).scenario.optimal_k);
    CHECK(run_cli("export-case 9") == 1);
}
