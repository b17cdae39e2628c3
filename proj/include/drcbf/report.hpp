#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "drcbf/sim.hpp"

namespace drcbf {

struct RunSummary {
    double min_distance = 0.0;
    /// Mean of D over steps with t >= 0.8 T.
    double steady_state_distance = 0.0;
    bool violation = false;
    double min_phi = 0.0;
    std::size_t guard_events = 0;
    double wall_clock = 0.0;
    RunStatus status = RunStatus::completed;
    std::string failure;
    std::size_t steps = 0;
};

/// b = D - min_distance, so a violation is min D < min_distance.
RunSummary summarize(const TrajectoryLog& log, double min_distance, double horizon, double wall_clock);
nlohmann::json to_json(const RunSummary& summary, const TrajectoryLog& log);

/// 0 completed and safe, 2 safety violated, 3 QP or integration fault.
int exit_code(const RunSummary& summary);

/// Columns: t, D, v_f, u, slack, d_u, d_m, phi_0..phi_{levels-1},
/// cbf_residual, clf_residual, qp_status. Numbers carry 17 significant digits.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log, std::size_t levels);
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, std::size_t column) const;
    std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

/// Static line chart with axes, ticks and a legend.
std::string render_svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                            const std::vector<SvgSeries>& series);

/// Writes trajectory.csv, summary.json and, if requested, speed.svg and
/// distance.svg (with the minimum-distance reference line) into `dir`.
void write_run_artifacts(const std::string& dir, const TrajectoryLog& log, const RunSummary& summary,
                         std::size_t levels, double min_distance, bool plots);

}  // namespace drcbf
