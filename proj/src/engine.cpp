#include "sdnabr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "sdnabr/errors.hpp"

namespace sdnabr {
namespace {

// One session's mutable world: clock, buffer, controller and client view.
class Session {
 public:
  explicit Session(const SessionConfig& config)
      : config_(config),
        catalog_(*config.catalog),
        topology_(*config.topology),
        controller_(config.controller, topology_) {
    view_.client.version_index = config.start_version;
  }

  SessionLog Run() {
    SessionLog log;
    log.config = config_;
    const int n = catalog_.num_segments();
    log.records.reserve(static_cast<std::size_t>(n));
    try {
      for (int seg = 0; seg < n; ++seg) log.records.push_back(Step(seg, log));
    } catch (const HorizonError& e) {
      log.truncated = true;
      log.truncation_reason = "segment " + std::to_string(log.records.size()) + ": " + e.what();
    }
    log.wall_end_s = log.records.empty() ? now_ : log.records.back().finish_time_s;
    log.path_changes.assign(controller_.path_changes().begin(), controller_.path_changes().end());
    log.reroute_requests = controller_.reroute_requests();
    return log;
  }

 private:
  SegmentRecord Step(int seg, SessionLog& log) {
    const double duration = catalog_.segment_duration_s();

    // Admission: never let the buffer exceed its cap once the segment lands.
    if (playing_ && buffer_ + duration > config_.buffer_max_s()) {
      Idle(buffer_ + duration - config_.buffer_max_s());
    }

    const Decision decision = Decide(seg);
    if (decision.hold_until_buffer_s && buffer_ > *decision.hold_until_buffer_s) {
      Idle(buffer_ - *decision.hold_until_buffer_s);
    }
    controller_.AdvanceTo(now_);
    if (decision.reroute_requested) controller_.RequestReroute(now_);

    SegmentRecord rec;
    rec.seg_index = seg;
    rec.version = decision.next_version;
    rec.zone = decision.zone;
    rec.rerouted = decision.reroute_requested;
    rec.actual_bitrate_kbps = catalog_.segment_bitrate(rec.version, seg);
    rec.size_kbits = segment_size_kbits(catalog_, rec.version, seg);
    rec.request_time_s = now_;
    rec.finish_time_s = Download(rec.size_kbits);
    const double download_time = rec.finish_time_s - rec.request_time_s;
    rec.measured_throughput_kbps = rec.size_kbits / download_time;

    if (!playing_) {
      playing_ = true;
      buffer_ = duration;
      log.startup_delay_s = rec.finish_time_s;
    } else {
      const BufferStep step = buffer_after_download(buffer_, download_time, duration);
      buffer_ = step.buffer_after_s;
      rec.stall_s = step.stall_s;
      log.total_stall_s += step.stall_s;
    }
    now_ = rec.finish_time_s;
    controller_.AdvanceTo(now_);
    rec.buffer_after_s = buffer_;
    rec.active_path = controller_.active_path();

    ClientState& client = view_.client;
    client.smoothed_throughput_kbps = update_smoothed_throughput(
        client.smoothed_throughput_kbps, rec.measured_throughput_kbps, config_.vasr.gamma, seg + 1);
    client.last_throughput_kbps = rec.measured_throughput_kbps;
    client.last_segment_bitrate_kbps = rec.actual_bitrate_kbps;
    client.version_index = rec.version;
    client.segments_downloaded = seg + 1;
    view_.history.push_back({rec.size_kbits, download_time});
    return rec;
  }

  Decision Decide(int seg) {
    ClientState& client = view_.client;
    client.buffer_s = buffer_;
    if (seg == 0) return {config_.start_version, false, Zone::kStartup, std::nullopt};
    switch (config_.algorithm) {
      case Algorithm::kVasr:
        // The start version is held until the buffer first reaches b_low.
        if (!startup_done_ && buffer_ >= config_.vasr.b_low_s) startup_done_ = true;
        if (!startup_done_) return {config_.start_version, false, Zone::kStartup, std::nullopt};
        return vasr_decide(client, catalog_, config_.vasr);
      case Algorithm::kAggressive:
        return aggressive_decide(client, catalog_);
      case Algorithm::kSara:
        return sara_decide(view_, catalog_, config_.sara);
    }
    return {};
  }

  void Idle(double seconds) {
    now_ += seconds;
    buffer_ -= seconds;
  }

  // Fluid transfer over whichever path is active, re-evaluated at every
  // controller transition. Returns the finish time.
  double Download(double size_kbits) {
    double remaining = size_kbits;
    double t = now_;
    for (;;) {
      const BandwidthTrace& trace = topology_.path(controller_.active_path()).trace;
      const double next_event = controller_.next_event_time();
      if (next_event >= trace.horizon_s()) return trace.transfer_finish_time(t, remaining);
      const double deliverable = trace.delivered_kbits(t, next_event);
      if (deliverable >= remaining) return trace.transfer_finish_time(t, remaining);
      remaining -= deliverable;
      t = next_event;
      controller_.AdvanceTo(t);
    }
  }

  const SessionConfig& config_;
  const VideoCatalog& catalog_;
  const Topology& topology_;
  RoutingController controller_;
  SaraState view_;  // client state plus download history
  double now_ = 0.0;
  double buffer_ = 0.0;
  bool playing_ = false;
  bool startup_done_ = false;
};

void append_fixed(std::string& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  out += buf;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kVasr: return "vasr";
    case Algorithm::kAggressive: return "aggressive";
    case Algorithm::kSara: return "sara";
  }
  return "vasr";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "vasr") return Algorithm::kVasr;
  if (name == "aggressive") return Algorithm::kAggressive;
  if (name == "sara") return Algorithm::kSara;
  throw ValidationError("algorithm: unknown adaptation algorithm '" + std::string(name) + "'");
}

double SessionConfig::buffer_max_s() const {
  switch (algorithm) {
    case Algorithm::kVasr: return vasr.b_max_s;
    case Algorithm::kAggressive: return aggressive.b_max_s;
    case Algorithm::kSara: return sara.b_max_s;
  }
  return vasr.b_max_s;
}

void SessionConfig::Validate() const {
  if (!catalog) throw ValidationError("catalog: not set");
  if (!topology) throw ValidationError("scenario: not set");
  vasr.Validate();
  switch (algorithm) {
    case Algorithm::kVasr: break;
    case Algorithm::kAggressive: aggressive.Validate(); break;
    case Algorithm::kSara: sara.Validate(); break;
  }
  controller.Validate();
  if (start_version < 0 || start_version > catalog->top_index()) {
    throw ValidationError("start_version: out of range for the catalog");
  }
  if (buffer_max_s() < catalog->segment_duration_s()) {
    throw ValidationError("b_max_s: must hold at least one segment");
  }
}

BufferStep buffer_after_download(double buffer_before_s, double download_time_s,
                                 double segment_duration_s) {
  const double drained = std::min(buffer_before_s, download_time_s);
  return {buffer_before_s - drained + segment_duration_s, download_time_s - drained};
}

SessionLog run_session(const SessionConfig& config) {
  config.Validate();
  return Session(config).Run();
}

double accounting_residual(const SessionLog& log) {
  if (log.records.empty()) return 0.0;
  const double content =
      static_cast<double>(log.records.size()) * log.config.catalog->segment_duration_s();
  const double final_buffer = log.records.back().buffer_after_s;
  return log.wall_end_s - (log.startup_delay_s + content - final_buffer + log.total_stall_s);
}

void write_segments_csv(const SessionLog& log, std::ostream& out) {
  std::string text(kSegmentsCsvHeader);
  text += '\n';
  for (const SegmentRecord& r : log.records) {
    text += std::to_string(r.seg_index);
    text += ',';
    text += std::to_string(r.version);
    for (double v : {r.actual_bitrate_kbps, r.size_kbits, r.request_time_s, r.finish_time_s,
                     r.measured_throughput_kbps, r.buffer_after_s}) {
      text += ',';
      append_fixed(text, v);
    }
    text += ',';
    text += std::to_string(r.active_path);
    text += ',';
    text += to_string(r.zone);
    text += ',';
    text += r.rerouted ? "1" : "0";
    text += ',';
    append_fixed(text, r.stall_s);
    text += '\n';
  }
  out << text;
}

}  // namespace sdnabr
