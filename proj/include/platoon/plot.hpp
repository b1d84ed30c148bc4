#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace platoon::plot {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool equal_aspect = false;
    std::vector<Series> series;
};

/// Static SVG line chart with axes, ticks and a legend.
std::string render_svg(const Chart& chart);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
};

/// Missing or empty plot input.
class PlotInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

CsvTable read_csv(const std::filesystem::path& path);

Chart velocity_chart(const CsvTable& trace);
Chart trajectory_chart(const CsvTable& trace);
Chart received_signal_chart(const CsvTable& received);

/// Renders every chart whose inputs exist in dir (and its ideal/ and itsg5/
/// subdirectories): velocity.svg and trajectory.svg from trace.csv,
/// received_signal.svg from received_signal.csv. Returns the files written.
/// Throws PlotInputError if nothing can be plotted or an input is empty.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir);

} // namespace platoon::plot
