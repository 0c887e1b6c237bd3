#include "sdnabr/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sdnabr/engine.hpp"

namespace sdnabr {
namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Rounds a span up to 1, 2 or 5 times a power of ten.
double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= f * mag) return f * mag;
  }
  return 10.0 * mag;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  std::size_t rows = 0;
};

// Numeric CSV reader; non-numeric cells are only allowed in `text_columns`.
Table read_csv(const std::filesystem::path& path, const std::string& expected_header,
               const std::vector<std::string>& text_columns = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != expected_header) {
    throw std::runtime_error(path.filename().string() + ": unexpected header");
  }
  Table table;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) table.header.push_back(cell);
  table.columns.resize(table.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::size_t col = 0;
    for (std::string cell; std::getline(ls, cell, ','); ++col) {
      if (col >= table.header.size()) {
        throw std::runtime_error(path.filename().string() + ": too many columns");
      }
      if (std::find(text_columns.begin(), text_columns.end(), table.header[col]) != text_columns.end()) {
        table.columns[col].push_back(0.0);
        continue;
      }
      try {
        std::size_t used = 0;
        table.columns[col].push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw std::runtime_error(path.filename().string() + ": malformed value '" + cell + "'");
      }
    }
    if (col != table.header.size()) throw std::runtime_error(path.filename().string() + ": short row");
    ++table.rows;
  }
  if (table.rows == 0) throw std::runtime_error(path.filename().string() + ": no data rows");
  return table;
}

const std::vector<double>& column(const Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  return t.columns[static_cast<std::size_t>(it - t.header.begin())];
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string render_svg_chart(const ChartSpec& chart, const std::vector<Series>& series) {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_min = x_max = s.x[i];
        y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= y_min) y_max = y_min + 1;
  const double y_step = nice_step(y_max - y_min, 5);
  y_max = std::ceil(y_max / y_step) * y_step;
  const double x_step = nice_step(x_max - x_min, 8);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(chart.title) + "</text>\n";
  for (double y = y_min; y <= y_max + 1e-9; y += y_step) {
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(kLeft + plot_w) +
           "\" y2=\"" + num(py(y)) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" +
           num(y) + "</text>\n";
  }
  for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9; x += x_step) {
    svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + num(x) + "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + num(kTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(chart.y_label) + "</text>\n";

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (chart.step && i > 0) points += num(px(s.x[i])) + "," + num(py(s.y[i - 1])) + " ";
      points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" +
           std::string(kColors[k % std::size(kColors)]) + "\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + num(kLeft + 10) + "\" y=\"" + num(kTop + 16 + 14.0 * k) + "\" fill=\"" +
           kColors[k % std::size(kColors)] + "\">" + escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> plot_run(const std::filesystem::path& run_dir,
                                            const std::filesystem::path& out_dir) {
  const Table segments = read_csv(run_dir / "segments.csv", std::string(kSegmentsCsvHeader), {"zone"});
  const Table bitrate_cdf = read_csv(run_dir / "bitrate_cdf.csv", "value,cum_fraction");
  const Table rate_cdf = read_csv(run_dir / "downloadrate_cdf.csv", "value,cum_fraction");

  const auto& seg = column(segments, "seg_index");
  const std::string run = run_dir.filename().string();
  std::vector<std::pair<std::string, std::string>> outputs = {
      {"version.svg",
       render_svg_chart({run + ": version index", "segment", "version index", true},
                        {{"version", seg, column(segments, "version")}})},
      {"bitrate.svg",
       render_svg_chart({run + ": bitrate", "segment", "kbps", false},
                        {{"segment bitrate", seg, column(segments, "actual_bitrate_kbps")},
                         {"download rate", seg, column(segments, "measured_throughput_kbps")}})},
      {"buffer.svg", render_svg_chart({run + ": buffer level", "segment", "seconds", false},
                                      {{"buffer", seg, column(segments, "buffer_after_s")}})},
      {"bitrate_cdf.svg",
       render_svg_chart({run + ": bitrate CDF", "kbps", "cumulative fraction", true},
                        {{"bitrate", column(bitrate_cdf, "value"), column(bitrate_cdf, "cum_fraction")}})},
      {"downloadrate_cdf.svg",
       render_svg_chart({run + ": download rate CDF", "kbps", "cumulative fraction", true},
                        {{"download rate", column(rate_cdf, "value"), column(rate_cdf, "cum_fraction")}})},
  };

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, svg] : outputs) {
    write_text(out_dir / name, svg);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace sdnabr
