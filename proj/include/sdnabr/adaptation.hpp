#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sdnabr/catalog.hpp"

namespace sdnabr {

// Client-side parameters of the VBR adaptation logic.
struct AdaptationParams {
  double b_low_s = 15.0;
  double b_high_s = 25.0;
  double b_max_s = 50.0;
  double delta0 = 0.5;  // deviation needed before switching
  double gamma = 0.7;   // throughput smoothing weight
  double mu = 0.1;      // throughput safety margin
  // By default the assisted zone assigns the optimal version outright, which
  // may be above the current one. Setting this caps it at the current version.
  bool assisted_cap_at_current = false;

  // Throws ValidationError naming the violated field.
  void Validate() const;
  bool operator==(const AdaptationParams&) const = default;
};

// What the client knows after downloading segment i.
struct ClientState {
  double buffer_s = 0.0;
  int version_index = 0;
  double smoothed_throughput_kbps = 0.0;
  double last_throughput_kbps = 0.0;
  double last_segment_bitrate_kbps = 0.0;
  int segments_downloaded = 0;
};

enum class Zone {
  kStartup,  // forced start version while the buffer first fills
  kSwitchUp,
  kStable,
  kSwitchDown,
  kAssistedSwitchDown,
  kNone,  // algorithms without buffer zones
};

std::string_view to_string(Zone zone);

struct Decision {
  int next_version = 0;
  bool reroute_requested = false;
  Zone zone = Zone::kNone;
  // When set, the player idles until its buffer drains to this level
  // before issuing the request.
  std::optional<double> hold_until_buffer_s;

  bool operator==(const Decision&) const = default;
};

// (throughput - bitrate) / bitrate. Positive means headroom for a higher
// quality. Throws std::invalid_argument on a non-positive bitrate.
double deviation(double throughput_kbps, double segment_bitrate_kbps);

// EWMA over per-segment throughput; the first sample seeds the average.
double update_smoothed_throughput(double prev_kbps, double measured_kbps, double gamma,
                                  int segment_count);

struct OptimalVersion {
  int index = 0;
  double bitrate_kbps = 0.0;  // that version's average bitrate
};

// Highest version whose average bitrate is strictly below (1 - mu) times
// the throughput estimate; version 0 when none qualifies.
OptimalVersion optimal_version(const VideoCatalog& catalog, double smoothed_throughput_kbps,
                               double mu);

// Logistic buffer threshold between b_low (large positive deviation) and
// b_high (large negative deviation).
double adaptive_threshold(double delta, double b_low_s, double b_high_s);

// Four-zone buffer/deviation rule. Only the assisted switch-down zone
// asks the controller for a new path and may move more than one level.
Decision vasr_decide(const ClientState& state, const VideoCatalog& catalog,
                     const AdaptationParams& params);

// Highest version whose average fits the last measured throughput.
Decision aggressive_decide(const ClientState& state, const VideoCatalog& catalog);

struct AggressiveParams {
  double b_max_s = 50.0;

  void Validate() const;
  bool operator==(const AggressiveParams&) const = default;
};

// Segment-aware rate adaptation baseline.
struct SaraParams {
  double i_s = 10.0;        // fast-start threshold
  double b_alpha_s = 15.0;  // additive-increase ceiling
  double b_beta_s = 25.0;   // delayed-download threshold
  double b_max_s = 50.0;
  int history_window = 5;   // recent downloads in the throughput estimate; 0 = all

  void Validate() const;
  bool operator==(const SaraParams&) const = default;
};

struct DownloadSample {
  double size_kbits = 0.0;
  double download_time_s = 0.0;
};

struct SaraState {
  ClientState client;
  std::vector<DownloadSample> history;
};

// Size-weighted harmonic mean of per-download throughputs, i.e. total
// size over total download time. Throws std::invalid_argument when empty.
double weighted_harmonic_throughput(std::span<const DownloadSample> history);

Decision sara_decide(const SaraState& state, const VideoCatalog& catalog, const SaraParams& params);

}  // namespace sdnabr
