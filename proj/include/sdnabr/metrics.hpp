#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"
#include "sdnabr/adaptation.hpp"
#include "sdnabr/engine.hpp"

namespace sdnabr {

struct MetricsReport {
  double avg_bitrate_kbps = 0.0;
  double avg_version_index = 0.0;
  double avg_buffer_s = 0.0;
  double frac_buffer_below_low = 0.0;
  int num_switch_downs = 0;
  int largest_switch_down_step = 0;
  double total_stall_s = 0.0;
  int num_stall_events = 0;

  bool operator==(const MetricsReport&) const = default;
};

enum class BufferStatistic {
  // Continuous buffer trajectory between the first and last completion.
  kTimeWeighted,
  // Plain mean over the per-segment buffer_after samples.
  kPerSegment,
};

// Throws std::invalid_argument on an empty log. Only params.b_low_s is used.
MetricsReport summarize(const SessionLog& log, const AdaptationParams& params,
                        BufferStatistic buffer_statistic = BufferStatistic::kTimeWeighted);

nlohmann::json to_json(const MetricsReport& report);

struct CdfPoint {
  double value = 0.0;
  double cum_fraction = 0.0;

  bool operator==(const CdfPoint&) const = default;
};

// Empirical CDF: one point per distinct value. Throws on empty input.
std::vector<CdfPoint> cdf(std::span<const double> values);

void write_cdf_csv(std::span<const CdfPoint> series, std::ostream& out);

}  // namespace sdnabr
