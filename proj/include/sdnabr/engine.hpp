#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sdnabr/adaptation.hpp"
#include "sdnabr/catalog.hpp"
#include "sdnabr/controller.hpp"
#include "sdnabr/netmodel.hpp"

namespace sdnabr {

enum class Algorithm { kVasr, kAggressive, kSara };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct SessionConfig {
  std::shared_ptr<const VideoCatalog> catalog;
  std::shared_ptr<const Topology> topology;
  Algorithm algorithm = Algorithm::kVasr;
  AdaptationParams vasr;
  SaraParams sara;
  AggressiveParams aggressive;
  ControllerParams controller;
  int start_version = 0;

  // Buffer cap of the selected algorithm.
  double buffer_max_s() const;
  // Throws ValidationError naming the offending field.
  void Validate() const;
};

struct SegmentRecord {
  int seg_index = 0;
  int version = 0;
  double actual_bitrate_kbps = 0.0;
  double size_kbits = 0.0;
  double request_time_s = 0.0;
  double finish_time_s = 0.0;
  double measured_throughput_kbps = 0.0;
  double buffer_after_s = 0.0;
  int active_path = 0;
  Zone zone = Zone::kNone;
  bool rerouted = false;
  double stall_s = 0.0;
};

struct SessionLog {
  SessionConfig config;
  std::vector<SegmentRecord> records;
  double total_stall_s = 0.0;
  double wall_end_s = 0.0;
  // Time from the first request until playback starts.
  double startup_delay_s = 0.0;
  std::vector<PathChange> path_changes;
  int reroute_requests = 0;
  bool truncated = false;
  std::string truncation_reason;
};

struct BufferStep {
  double buffer_after_s = 0.0;
  double stall_s = 0.0;

  bool operator==(const BufferStep&) const = default;
};

// Playback drains the buffer while a segment downloads; whatever the
// buffer cannot cover is stall time. The segment lands at the end.
BufferStep buffer_after_download(double buffer_before_s, double download_time_s,
                                 double segment_duration_s);

// Simulates one streaming session. A trace horizon reached mid-download
// returns the records completed so far with `truncated` set.
SessionLog run_session(const SessionConfig& config);

// Gap in the session time identity
//   wall_end = startup_delay + N * duration - final_buffer + total_stall.
double accounting_residual(const SessionLog& log);

inline constexpr std::string_view kSegmentsCsvHeader =
    "seg_index,version,actual_bitrate_kbps,size_kbits,request_time_s,finish_time_s,"
    "measured_throughput_kbps,buffer_after_s,path_id,zone,rerouted,stall_s";

void write_segments_csv(const SessionLog& log, std::ostream& out);

}  // namespace sdnabr
