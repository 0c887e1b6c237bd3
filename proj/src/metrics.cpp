#include "sdnabr/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sdnabr {
namespace {

// Between completions k and k+1 the buffer drains linearly from
// buffer_after_k and rests at zero while stalled.
struct Interval {
  double length = 0.0;
  double buffer_integral = 0.0;
  double time_below = 0.0;
};

Interval drain_interval(double start_level, double length, double low) {
  Interval iv;
  iv.length = length;
  if (start_level >= length) {
    iv.buffer_integral = length * start_level - 0.5 * length * length;
  } else {
    iv.buffer_integral = 0.5 * start_level * start_level;
  }
  iv.time_below = length - std::clamp(start_level - low, 0.0, length);
  return iv;
}

}  // namespace

MetricsReport summarize(const SessionLog& log, const AdaptationParams& params,
                        BufferStatistic buffer_statistic) {
  const auto& recs = log.records;
  if (recs.empty()) throw std::invalid_argument("summarize: empty session log");
  const double n = static_cast<double>(recs.size());
  const double low = params.b_low_s;

  MetricsReport report;
  double bitrate_sum = 0.0;
  double version_sum = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    bitrate_sum += recs[i].actual_bitrate_kbps;
    version_sum += recs[i].version;
    if (recs[i].stall_s > 0.0) ++report.num_stall_events;
    report.total_stall_s += recs[i].stall_s;
    if (i > 0 && recs[i].version < recs[i - 1].version) {
      ++report.num_switch_downs;
      report.largest_switch_down_step =
          std::max(report.largest_switch_down_step, recs[i - 1].version - recs[i].version);
    }
  }
  report.avg_bitrate_kbps = bitrate_sum / n;
  report.avg_version_index = version_sum / n;

  double total = 0.0;
  double integral = 0.0;
  double below = 0.0;
  if (buffer_statistic == BufferStatistic::kTimeWeighted) {
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      const Interval iv = drain_interval(recs[i].buffer_after_s,
                                         recs[i + 1].finish_time_s - recs[i].finish_time_s, low);
      total += iv.length;
      integral += iv.buffer_integral;
      below += iv.time_below;
    }
  }
  if (total > 0.0) {
    report.avg_buffer_s = integral / total;
    report.frac_buffer_below_low = below / total;
  } else {
    double sum = 0.0;
    int count_below = 0;
    for (const SegmentRecord& r : recs) {
      sum += r.buffer_after_s;
      if (r.buffer_after_s < low) ++count_below;
    }
    report.avg_buffer_s = sum / n;
    report.frac_buffer_below_low = count_below / n;
  }
  return report;
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"avg_bitrate_kbps", r.avg_bitrate_kbps},
          {"avg_version_index", r.avg_version_index},
          {"avg_buffer_s", r.avg_buffer_s},
          {"frac_buffer_below_low", r.frac_buffer_below_low},
          {"num_switch_downs", r.num_switch_downs},
          {"largest_switch_down_step", r.largest_switch_down_step},
          {"total_stall_s", r.total_stall_s},
          {"num_stall_events", r.num_stall_events}};
}

std::vector<CdfPoint> cdf(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cdf: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CdfPoint> series;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    series.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  return series;
}

void write_cdf_csv(std::span<const CdfPoint> series, std::ostream& out) {
  std::string text = "value,cum_fraction\n";
  char buf[96];
  for (const CdfPoint& p : series) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.value, p.cum_fraction);
    text += buf;
  }
  out << text;
}

}  // namespace sdnabr
