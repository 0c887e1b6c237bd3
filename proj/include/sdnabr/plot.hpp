#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sdnabr {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool step = false;  // draw as a staircase (CDFs, version index)
};

// Standalone SVG line chart.
std::string render_svg_chart(const ChartSpec& chart, const std::vector<Series>& series);

// Reads segments.csv, bitrate_cdf.csv and downloadrate_cdf.csv from run_dir
// and writes version.svg, bitrate.svg, buffer.svg, bitrate_cdf.svg and
// downloadrate_cdf.svg to out_dir. All inputs are validated before any
// file is written. Throws std::runtime_error on missing or malformed CSV.
std::vector<std::filesystem::path> plot_run(const std::filesystem::path& run_dir,
                                            const std::filesystem::path& out_dir);

}  // namespace sdnabr
