#include "drcbf/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "drcbf/errors.hpp"

namespace drcbf {

RunSummary summarize(const TrajectoryLog& log, double min_distance, double horizon, double wall_clock)
{
    RunSummary s;
    s.min_distance = std::numeric_limits<double>::infinity();
    s.min_phi = std::numeric_limits<double>::infinity();
    double tail_sum = 0.0;
    std::size_t tail_count = 0;
    for (const auto& step : log.steps) {
        s.min_distance = std::min(s.min_distance, step.x[0]);
        for (double phi : step.levels) s.min_phi = std::min(s.min_phi, phi);
        if (step.t >= 0.8 * horizon - 1e-12) {
            tail_sum += step.x[0];
            ++tail_count;
        }
    }
    s.steady_state_distance = tail_count ? tail_sum / tail_count : std::numeric_limits<double>::quiet_NaN();
    s.violation = s.min_distance - min_distance < 0.0;
    s.guard_events = log.guard_events;
    s.wall_clock = wall_clock;
    s.status = log.status;
    s.failure = log.failure;
    s.steps = log.steps.size();
    return s;
}

nlohmann::json to_json(const RunSummary& s, const TrajectoryLog& log)
{
    auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    nlohmann::json out = {
        {"min_distance", finite_or_null(s.min_distance)},
        {"steady_state_distance", finite_or_null(s.steady_state_distance)},
        {"violation", s.violation},
        {"min_phi", finite_or_null(s.min_phi)},
        {"guard_events", s.guard_events},
        {"wall_clock", s.wall_clock},
        {"status", to_string(s.status)},
        {"steps", s.steps},
    };
    if (!s.failure.empty()) out["failure"] = s.failure;
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [key, value] : log.metadata) meta[key] = value;
    out["metadata"] = meta;
    return out;
}

int exit_code(const RunSummary& s)
{
    if (s.status != RunStatus::completed) return 3;
    return s.violation ? 2 : 0;
}

std::string format_number(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log, std::size_t levels)
{
    out << "t,D,v_f,u,slack,d_u,d_m";
    for (std::size_t i = 0; i < levels; ++i) out << ",phi_" << i;
    out << ",cbf_residual,clf_residual,qp_status\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : log.steps) {
        auto field = [&](double v) { out << format_number(v) << ','; };
        field(s.t);
        field(s.x[0]);
        field(s.x[1]);
        field(s.u.size() ? s.u[0] : nan);
        field(s.slack);
        field(s.d.size() > 0 ? s.d[0] : 0.0);
        field(s.d.size() > 1 ? s.d[1] : 0.0);
        for (std::size_t i = 0; i < levels; ++i) field(i < s.levels.size() ? s.levels[i] : nan);
        field(s.cbf_residual);
        field(s.clf_residual);
        out << to_string(s.status) << '\n';
    }
}

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const
{
    const auto& cell = rows.at(row).at(col);
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ValidationError("CSV cell '" + cell + "' is not a number");
    }
    return v;
}

std::vector<double> CsvTable::numbers(const std::string& name) const
{
    const auto col = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(number(r, col));
    return out;
}

CsvTable read_csv(std::istream& in)
{
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) return table;
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.header.size()) throw ValidationError("CSV row has the wrong number of cells");
        table.rows.push_back(std::move(cells));
    }
    return table;
}

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

/// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target)
{
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v)
{
    std::ostringstream s;
    s << (std::abs(v) < 1e-12 ? 0.0 : v);
    return s.str();
}

}  // namespace

std::string render_svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                            const std::vector<SvgSeries>& series)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = nice_step(x1 - x0, 8), ys = nice_step(y1 - y0, 6);
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        svg << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t) << "\" y2=\"" << kTop
            << "\" stroke=\"#e0e0e0\"/>\n";
        svg << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << tick_label(t)
            << "</text>\n";
    }
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << py(t)
            << "\" stroke=\"#e0e0e0\"/>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << tick_label(t)
            << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(y_label) << "</text>\n";

    double legend_y = kTop + 16;
    for (const auto& s : series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
        svg << " points=\"";
        for (std::size_t i = 0; i < n; i += stride) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        if (n && (n - 1) % stride) svg << px(s.x[n - 1]) << ',' << py(s.y[n - 1]);
        svg << "\"/>\n";
        svg << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << legend_y << "\" x2=\"" << kLeft + pw - 125
            << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        svg << "<text x=\"" << kLeft + pw - 118 << "\" y=\"" << legend_y + 4 << "\">" << escape(s.label)
            << "</text>\n";
        legend_y += 16;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_run_artifacts(const std::string& dir, const TrajectoryLog& log, const RunSummary& summary,
                         std::size_t levels, double min_distance, bool plots)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        return out;
    };
    {
        auto out = open("trajectory.csv");
        write_trajectory_csv(out, log, levels);
    }
    {
        auto out = open("summary.json");
        out << to_json(summary, log).dump(2) << '\n';
    }
    if (!plots) return;

    std::vector<double> t, D, v;
    for (const auto& s : log.steps) {
        t.push_back(s.t);
        D.push_back(s.x[0]);
        v.push_back(s.x[1]);
    }
    {
        auto out = open("speed.svg");
        out << render_svg_plot("Follower speed", "t [s]", "v_f [m/s]", {{"v_f", t, v}});
    }
    {
        std::vector<double> ref_t{t.empty() ? 0.0 : t.front(), t.empty() ? 1.0 : t.back()};
        auto out = open("distance.svg");
        out << render_svg_plot("Relative distance", "t [s]", "D [m]",
                               {{"D", t, D}, {"D_min", ref_t, {min_distance, min_distance}, "#d62728", true}});
    }
}

}  // namespace drcbf
