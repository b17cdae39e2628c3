// Command-line front end: run a config, sweep one parameter, or export a
// benchmark case as a config file.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "drcbf/runner.hpp"

using namespace drcbf;

namespace {

std::vector<nlohmann::json> split_values(const std::string& list)
{
    std::vector<nlohmann::json> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_scalar(item));
    }
    if (out.empty()) throw ConfigError("--values", "no values given");
    return out;
}

void apply_set(nlohmann::json& doc, const std::vector<std::string>& assignments)
{
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ConfigError(a, "expected key=value");
        set_config_value(doc, a.substr(0, eq), parse_scalar(a.substr(eq + 1)));
    }
}

void print_summary(const std::string& tag, const RunSummary& s)
{
    std::cout << tag << "status=" << to_string(s.status) << " min_distance=" << format_number(s.min_distance)
              << " steady_state_distance=" << format_number(s.steady_state_distance)
              << " violation=" << (s.violation ? "true" : "false") << " min_phi=" << format_number(s.min_phi)
              << " guard_events=" << s.guard_events << " wall_clock=" << s.wall_clock << "s\n";
    if (!s.failure.empty()) std::cout << "  " << s.failure << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Disturbance-rejection CBF simulator for the adaptive cruise control benchmark"};
    app.require_subcommand(1);

    std::string config_path, controller, out_dir, param, values, variant = "drcbf", export_out;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::vector<std::string> sets;
    unsigned threads = 0;
    int case_id = 1;

    auto* run = app.add_subcommand("run", "Run one closed-loop simulation");
    run->add_option("config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--controller", controller, "none | hocbf | drcbf | adrcbf");
    run->add_option("--seed", seed, "Disturbance seed");
    run->add_option("--horizon", horizon, "Simulated time [s]");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--set", sets, "Override any config key: path=value (repeatable)");

    auto* sweep = app.add_subcommand("sweep", "Run one simulation per value of a config parameter");
    sweep->add_option("config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--param", param, "Dotted config path, e.g. controller.k_multiplier")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--set", sets, "Override any config key: path=value (repeatable)");
    sweep->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

    auto* exporter = app.add_subcommand("export-case", "Write a benchmark case as a run config");
    exporter->add_option("case", case_id, "Case id (1, 2 or 3)")->required();
    exporter->add_option("--controller", variant, "none | hocbf | drcbf | adrcbf");
    exporter->add_option("--out", export_out, "Destination file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*exporter) {
            RunConfig config;
            config.scenario = case_scenario(case_id, variant);
            config.output_dir = "out/case" + std::to_string(case_id);
            const auto text = to_json(config).dump(2) + "\n";
            if (export_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream(export_out) << text;
            }
            return 0;
        }

        auto doc = load_json_file(config_path);
        parse_run_config(doc);
        apply_set(doc, sets);
        if (!controller.empty()) set_config_value(doc, "controller.type", controller);
        if (seed) set_config_value(doc, "disturbance.seed", *seed);
        if (horizon) set_config_value(doc, "simulation.horizon", *horizon);
        if (!out_dir.empty()) set_config_value(doc, "output.dir", out_dir);

        if (*run) {
            const auto config = parse_run_config(doc);
            const auto outcome = execute_run(config);
            print_summary("", outcome.summary);
            std::cout << "artifacts: " << config.output_dir << "\n";
            return outcome.exit_code;
        }

        const auto entries = execute_sweep(doc, param, split_values(values), threads);
        int code = 0;
        for (const auto& e : entries) {
            print_summary(param + "=" + e.value.dump() + " ", e.summary);
            code = std::max(code, e.exit_code);
        }
        std::cout << "comparison: " << parse_run_config(doc).output_dir << "/comparison.csv\n";
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.path() << ": " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fault: " << e.what() << "\n";
        return 3;
    }
}
