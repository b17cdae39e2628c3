#include "drcbf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

namespace drcbf {

RunOutcome execute_run(const RunConfig& config, bool write)
{
    const auto start = std::chrono::steady_clock::now();
    const auto sim = build_simulation(config.scenario);
    RunOutcome out;
    out.log = run_simulation(sim);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& p = config.scenario.params;
    out.summary = summarize(out.log, p.min_distance, config.scenario.horizon, elapsed);
    out.exit_code = exit_code(out.summary);
    if (write) {
        const std::size_t levels = config.scenario.controller == BarrierMode::none ? 1 : 2;
        write_run_artifacts(config.output_dir, out.log, out.summary, levels, p.min_distance, config.plots);
    }
    return out;
}

namespace {

std::string label(const std::string& path, const nlohmann::json& value)
{
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    std::string out = path + "=" + text;
    std::replace_if(out.begin(), out.end(), [](char c) { return c == '/' || c == ' ' || c == '"'; }, '_');
    return out;
}

}  // namespace

std::vector<SweepEntry> execute_sweep(const nlohmann::json& document, const std::string& path,
                                      const std::vector<nlohmann::json>& values, unsigned threads)
{
    const auto base = parse_run_config(document);
    // Validate every value up front so no run starts on a bad sweep.
    std::vector<RunConfig> configs;
    std::vector<SweepEntry> entries(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto doc = document;
        set_config_value(doc, path, values[i]);
        auto config = parse_run_config(doc);
        config.output_dir = (std::filesystem::path(base.output_dir) / label(path, values[i])).string();
        entries[i].value = values[i];
        entries[i].dir = config.output_dir;
        configs.push_back(std::move(config));
    }

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, values.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(values.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                const auto outcome = execute_run(configs[i]);
                entries[i].summary = outcome.summary;
                entries[i].exit_code = outcome.exit_code;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::filesystem::create_directories(base.output_dir);
    std::ofstream table(std::filesystem::path(base.output_dir) / "comparison.csv");
    write_comparison_csv(table, path, entries);
    return entries;
}

void write_comparison_csv(std::ostream& out, const std::string& path, const std::vector<SweepEntry>& entries)
{
    out << path << ",min_distance,steady_state_distance,violation,min_phi,guard_events,status\n";
    for (const auto& e : entries) {
        std::string value = e.value.is_string() ? e.value.get<std::string>() : e.value.dump();
        std::replace(value.begin(), value.end(), ',', ';');
        out << value << ','
            << format_number(e.summary.min_distance) << ',' << format_number(e.summary.steady_state_distance) << ','
            << (e.summary.violation ? "true" : "false") << ',' << format_number(e.summary.min_phi) << ','
            << e.summary.guard_events << ',' << to_string(e.summary.status) << '\n';
    }
}

}  // namespace drcbf
