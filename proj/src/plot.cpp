#include "platoon/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace platoon::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr std::size_t kMaxPoints = 2000;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

double nice_step(double span)
{
    if (!(span > 0.0)) {
        return 1.0;
    }
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad()
    {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-9) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double cell_value(const std::string& s)
{
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

std::string render_svg(const Chart& chart)
{
    Range xr, yr;
    for (const auto& s : chart.series) {
        for (const auto& [x, y] : s.points) {
            if (std::isfinite(x) && std::isfinite(y)) {
                xr.add(x);
                yr.add(y);
            }
        }
    }
    xr.pad();
    yr.pad();

    double plot_w = kWidth - kLeft - kRight;
    double plot_h = kHeight - kTop - kBottom;
    if (chart.equal_aspect) {
        const double scale = std::min(plot_w / (xr.hi - xr.lo), plot_h / (yr.hi - yr.lo));
        const double cx = 0.5 * (xr.lo + xr.hi);
        const double cy = 0.5 * (yr.lo + yr.hi);
        xr = {cx - 0.5 * plot_w / scale, cx + 0.5 * plot_w / scale};
        yr = {cy - 0.5 * plot_h / scale, cy + 0.5 * plot_h / scale};
    }
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::string svg;
    svg += fmt::format(R"(<?xml version="1.0" encoding="UTF-8"?>)"
                       "\n"
                       R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif" font-size="12">)"
                       "\n",
                       kWidth, kHeight);
    svg += fmt::format(R"(<rect x="0" y="0" width="{}" height="{}" fill="white"/>)"
                       "\n",
                       kWidth, kHeight);
    svg += fmt::format(R"(<text x="{:.1f}" y="22" text-anchor="middle" font-size="15">{}</text>)"
                       "\n",
                       kLeft + plot_w / 2.0, escape(chart.title));

    // grid and ticks
    const double xs = nice_step(xr.hi - xr.lo);
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
        svg += fmt::format(R"(<line x1="{0:.1f}" y1="{1:.1f}" x2="{0:.1f}" y2="{2:.1f}" stroke="#ddd"/>)"
                           R"(<text x="{0:.1f}" y="{3:.1f}" text-anchor="middle">{4:g}</text>)"
                           "\n",
                           px(t), kTop, kTop + plot_h, kTop + plot_h + 16.0, std::abs(t) < 1e-12 ? 0.0 : t);
    }
    const double ys = nice_step(yr.hi - yr.lo);
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
        svg += fmt::format(R"(<line x1="{0:.1f}" y1="{1:.1f}" x2="{2:.1f}" y2="{1:.1f}" stroke="#ddd"/>)"
                           R"(<text x="{3:.1f}" y="{4:.1f}" text-anchor="end">{5:g}</text>)"
                           "\n",
                           kLeft, py(t), kLeft + plot_w, kLeft - 6.0, py(t) + 4.0,
                           std::abs(t) < 1e-12 ? 0.0 : t);
    }
    svg += fmt::format(R"(<rect x="{:.1f}" y="{:.1f}" width="{:.1f}" height="{:.1f}" fill="none" stroke="black"/>)"
                       "\n",
                       kLeft, kTop, plot_w, plot_h);
    svg += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{}</text>)"
                       "\n",
                       kLeft + plot_w / 2.0, kHeight - 12.0, escape(chart.x_label));
    svg += fmt::format(R"svg(<text x="16" y="{0:.1f}" text-anchor="middle" transform="rotate(-90 16 {0:.1f})">{1}</text>)svg"
                       "\n",
                       kTop + plot_h / 2.0, escape(chart.y_label));

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        const std::size_t stride = std::max<std::size_t>(1, s.points.size() / kMaxPoints);
        std::string pts;
        for (std::size_t k = 0; k < s.points.size(); k += stride) {
            const auto& [x, y] = s.points[k];
            if (std::isfinite(x) && std::isfinite(y)) {
                pts += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
            }
        }
        if (!s.points.empty() && (s.points.size() - 1) % stride != 0) {
            const auto& [x, y] = s.points.back();
            if (std::isfinite(x) && std::isfinite(y)) {
                pts += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
            }
        }
        if (!pts.empty()) {
            pts.pop_back();
        }
        svg += fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)"
                           "\n",
                           color, pts);
        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
        svg += fmt::format(R"(<line x1="{0:.1f}" y1="{1:.1f}" x2="{2:.1f}" y2="{1:.1f}" stroke="{3}" stroke-width="2"/>)"
                           R"(<text x="{4:.1f}" y="{5:.1f}">{6}</text>)"
                           "\n",
                           kLeft + plot_w + 10.0, ly, kLeft + plot_w + 30.0, color,
                           kLeft + plot_w + 35.0, ly + 4.0, escape(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

std::size_t CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::out_of_range("missing column " + name);
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw PlotInputError("missing input " + path.string());
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw PlotInputError("empty input " + path.string());
    }
    table.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) {
            table.rows.push_back(split(line));
        }
    }
    if (table.rows.empty()) {
        throw PlotInputError("no data rows in " + path.string());
    }
    return table;
}

namespace {

std::map<std::string, Series> group_by(const CsvTable& table, const std::string& key,
                                       const std::string& label_prefix, std::size_t xcol,
                                       std::size_t ycol)
{
    const std::size_t kcol = table.column(key);
    std::map<std::string, Series> groups;
    for (const auto& row : table.rows) {
        if (row.size() <= std::max({kcol, xcol, ycol})) {
            continue;
        }
        auto& s = groups[row[kcol]];
        s.label = label_prefix + row[kcol];
        const double x = cell_value(row[xcol]);
        const double y = cell_value(row[ycol]);
        if (std::isfinite(x) && std::isfinite(y)) {
            s.points.emplace_back(x, y);
        }
    }
    return groups;
}

std::vector<Series> by_numeric_key(std::map<std::string, Series> groups)
{
    std::vector<std::pair<double, Series>> keyed;
    for (auto& [k, s] : groups) {
        keyed.emplace_back(cell_value(k), std::move(s));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Series> out;
    for (auto& [k, s] : keyed) {
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

Chart velocity_chart(const CsvTable& trace)
{
    Chart c{"Vehicle velocity", "time [s]", "velocity [m/s]", false, {}};
    c.series = by_numeric_key(
        group_by(trace, "vehicle_id", "vehicle ", trace.column("t"), trace.column("v")));
    return c;
}

Chart trajectory_chart(const CsvTable& trace)
{
    Chart c{"Vehicle trajectories", "x [m]", "y [m]", true, {}};
    c.series = by_numeric_key(
        group_by(trace, "vehicle_id", "vehicle ", trace.column("x"), trace.column("y")));
    return c;
}

Chart received_signal_chart(const CsvTable& received)
{
    Chart c{"Leader velocity received by vehicle 2", "time [s]", "velocity [m/s]", false, {}};
    const std::size_t t = received.column("t");
    const std::size_t tv = received.column("true_v");
    const std::size_t rv = received.column("received_v");
    const std::size_t ch = received.column("channel");
    Series truth{"true", {}};
    std::map<std::string, Series> per_channel;
    std::string first_channel;
    for (const auto& row : received.rows) {
        if (row.size() <= ch) {
            continue;
        }
        if (first_channel.empty()) {
            first_channel = row[ch];
        }
        const double time = cell_value(row[t]);
        if (row[ch] == first_channel) {
            truth.points.emplace_back(time, cell_value(row[tv]));
        }
        auto& s = per_channel[row[ch]];
        s.label = "received (" + row[ch] + ")";
        const double v = cell_value(row[rv]);
        if (std::isfinite(v)) {
            s.points.emplace_back(time, v);
        }
    }
    c.series.push_back(std::move(truth));
    for (auto& [name, s] : per_channel) {
        c.series.push_back(std::move(s));
    }
    return c;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void plot_one(const std::filesystem::path& dir, std::vector<std::filesystem::path>& written)
{
    if (std::filesystem::exists(dir / "trace.csv")) {
        const CsvTable trace = read_csv(dir / "trace.csv");
        write_file(dir / "velocity.svg", render_svg(velocity_chart(trace)));
        write_file(dir / "trajectory.svg", render_svg(trajectory_chart(trace)));
        written.push_back(dir / "velocity.svg");
        written.push_back(dir / "trajectory.svg");
    }
    if (std::filesystem::exists(dir / "received_signal.csv")) {
        const CsvTable received = read_csv(dir / "received_signal.csv");
        write_file(dir / "received_signal.svg", render_svg(received_signal_chart(received)));
        written.push_back(dir / "received_signal.svg");
    }
}

} // namespace

std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) {
        throw PlotInputError("no such directory " + dir.string());
    }
    std::vector<std::filesystem::path> written;
    try {
        plot_one(dir, written);
        for (const char* sub : {"ideal", "itsg5"}) {
            if (std::filesystem::is_directory(dir / sub)) {
                plot_one(dir / sub, written);
            }
        }
    } catch (const std::out_of_range& e) {
        throw PlotInputError(e.what());
    }
    if (written.empty()) {
        throw PlotInputError("no trace.csv or received_signal.csv in " + dir.string());
    }
    return written;
}

} // namespace platoon::plot
