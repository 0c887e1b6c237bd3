#include "sdnabr/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdnabr/errors.hpp"

namespace sdnabr {
namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

std::string_view to_string(Zone zone) {
  switch (zone) {
    case Zone::kStartup: return "startup";
    case Zone::kSwitchUp: return "switch_up";
    case Zone::kStable: return "stable";
    case Zone::kSwitchDown: return "switch_down";
    case Zone::kAssistedSwitchDown: return "assisted_switch_down";
    case Zone::kNone: return "none";
  }
  return "none";
}

void AdaptationParams::Validate() const {
  require(b_low_s > 0.0, "b_low_s: must be positive");
  require(b_low_s < b_high_s, "b_low_s/b_high_s: b_low_s must be below b_high_s");
  require(b_high_s < b_max_s, "b_high_s/b_max_s: b_high_s must be below b_max_s");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma: must lie in [0, 1]");
  require(mu >= 0.0 && mu < 1.0, "mu: must lie in [0, 1)");
  require(delta0 > 0.0, "delta0: must be positive");
}

void AggressiveParams::Validate() const { require(b_max_s > 0.0, "b_max_s: must be positive"); }

void SaraParams::Validate() const {
  require(i_s > 0.0, "i_s: must be positive");
  require(i_s < b_alpha_s, "i_s/b_alpha_s: i_s must be below b_alpha_s");
  require(b_alpha_s < b_beta_s, "b_alpha_s/b_beta_s: b_alpha_s must be below b_beta_s");
  require(b_beta_s < b_max_s, "b_beta_s/b_max_s: b_beta_s must be below b_max_s");
  require(history_window >= 0, "history_window: must be >= 0");
}

double deviation(double throughput_kbps, double segment_bitrate_kbps) {
  if (!(segment_bitrate_kbps > 0.0)) {
    throw std::invalid_argument("deviation: segment bitrate must be positive");
  }
  return (throughput_kbps - segment_bitrate_kbps) / segment_bitrate_kbps;
}

double update_smoothed_throughput(double prev_kbps, double measured_kbps, double gamma,
                                  int segment_count) {
  if (segment_count <= 1) return measured_kbps;
  return (1.0 - gamma) * prev_kbps + gamma * measured_kbps;
}

OptimalVersion optimal_version(const VideoCatalog& catalog, double smoothed_throughput_kbps,
                               double mu) {
  const double limit = (1.0 - mu) * smoothed_throughput_kbps;
  for (int v = catalog.top_index(); v >= 0; --v) {
    if (catalog.avg_bitrate(v) < limit) return {v, catalog.avg_bitrate(v)};
  }
  return {0, catalog.avg_bitrate(0)};
}

double adaptive_threshold(double delta, double b_low_s, double b_high_s) {
  return b_high_s - logistic(delta) * (b_high_s - b_low_s);
}

Decision vasr_decide(const ClientState& state, const VideoCatalog& catalog,
                     const AdaptationParams& params) {
  const int current = std::clamp(state.version_index, 0, catalog.top_index());
  if (state.segments_downloaded == 0) return {current, false, Zone::kStartup, std::nullopt};

  const double delta = deviation(state.last_throughput_kbps, state.last_segment_bitrate_kbps);
  const OptimalVersion opt = optimal_version(catalog, state.smoothed_throughput_kbps, params.mu);
  const double current_avg = catalog.avg_bitrate(current);
  const double buffer = state.buffer_s;

  Decision d;
  d.next_version = current;
  if (buffer >= params.b_high_s) {
    d.zone = Zone::kSwitchUp;
    if (delta > params.delta0 && current_avg < opt.bitrate_kbps) d.next_version = current + 1;
  } else if (buffer >= adaptive_threshold(delta, params.b_low_s, params.b_high_s)) {
    d.zone = Zone::kStable;
  } else if (buffer >= params.b_low_s) {
    d.zone = Zone::kSwitchDown;
    if (delta < -params.delta0 &&
        (current_avg > opt.bitrate_kbps || state.last_segment_bitrate_kbps > current_avg)) {
      d.next_version = current - 1;
    }
  } else {
    d.zone = Zone::kAssistedSwitchDown;
    d.reroute_requested = true;
    d.next_version = params.assisted_cap_at_current ? std::min(opt.index, current) : opt.index;
  }
  d.next_version = std::clamp(d.next_version, 0, catalog.top_index());
  return d;
}

Decision aggressive_decide(const ClientState& state, const VideoCatalog& catalog) {
  int pick = 0;
  for (int v = catalog.top_index(); v >= 0; --v) {
    if (catalog.avg_bitrate(v) <= state.last_throughput_kbps) {
      pick = v;
      break;
    }
  }
  return {pick, false, Zone::kNone, std::nullopt};
}

double weighted_harmonic_throughput(std::span<const DownloadSample> history) {
  if (history.empty()) throw std::invalid_argument("weighted_harmonic_throughput: empty history");
  double size = 0.0;
  double time = 0.0;
  for (const DownloadSample& s : history) {
    size += s.size_kbits;
    time += s.download_time_s;
  }
  return size / time;
}

Decision sara_decide(const SaraState& state, const VideoCatalog& catalog, const SaraParams& params) {
  const double buffer = state.client.buffer_s;
  const int current = std::clamp(state.client.version_index, 0, catalog.top_index());
  if (state.history.empty() || buffer < params.i_s) return {0, false, Zone::kNone, std::nullopt};

  std::span<const DownloadSample> recent = state.history;
  if (params.history_window > 0 && recent.size() > static_cast<std::size_t>(params.history_window)) {
    recent = recent.last(static_cast<std::size_t>(params.history_window));
  }
  const double estimate = weighted_harmonic_throughput(recent);
  const int next_segment = std::min(state.client.segments_downloaded, catalog.num_segments() - 1);
  const double slack = buffer - params.i_s;
  auto fits = [&](int v) {
    return segment_size_kbits(catalog, v, next_segment) / estimate <= slack;
  };
  auto highest_fitting = [&] {
    for (int v = catalog.top_index(); v > 0; --v) {
      if (fits(v)) return v;
    }
    return 0;
  };

  Decision d;
  d.zone = Zone::kNone;
  if (buffer < params.b_alpha_s) {
    if (!fits(current)) {
      d.next_version = std::min(highest_fitting(), current);
    } else if (current < catalog.top_index() && fits(current + 1)) {
      d.next_version = current + 1;
    } else {
      d.next_version = current;
    }
    return d;
  }
  d.next_version = highest_fitting();
  if (buffer >= params.b_beta_s) d.hold_until_buffer_s = params.b_beta_s;
  return d;
}

}  // namespace sdnabr
