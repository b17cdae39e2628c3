#pragma once

#include <string>
#include <vector>

#include "drcbf/report.hpp"
#include "drcbf/run_config.hpp"

namespace drcbf {

struct RunOutcome {
    TrajectoryLog log;
    RunSummary summary;
    int exit_code = 0;
};

/// Builds and runs the scenario; writes artifacts when `write` is set.
RunOutcome execute_run(const RunConfig& config, bool write = true);

struct SweepEntry {
    nlohmann::json value;
    std::string dir;
    RunSummary summary;
    int exit_code = 0;
};

/// One run per value of `path`, all sharing the document's seed, executed on
/// up to `threads` workers. Each run writes into <output_dir>/<label>; the
/// comparison table goes to <output_dir>/comparison.csv.
std::vector<SweepEntry> execute_sweep(const nlohmann::json& document, const std::string& path,
                                      const std::vector<nlohmann::json>& values, unsigned threads = 0);

void write_comparison_csv(std::ostream& out, const std::string& path, const std::vector<SweepEntry>& entries);

}  // namespace drcbf
