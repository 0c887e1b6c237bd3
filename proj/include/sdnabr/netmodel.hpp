#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sdnabr {

struct TracePoint {
  double start_s = 0.0;
  double bandwidth_kbps = 0.0;

  bool operator==(const TracePoint&) const = default;
};

// Piecewise-constant path capacity. Step k covers [start_k, start_{k+1}),
// the last step runs to the horizon.
class BandwidthTrace {
 public:
  BandwidthTrace(std::vector<TracePoint> samples, double horizon_s);

  // Left-closed lookup; valid for 0 <= time <= horizon.
  double bandwidth_at(double time_s) const;
  // Exact integral of the step function over [t0, t1], in kilobits.
  double delivered_kbits(double t0_s, double t1_s) const;
  // Time-weighted mean over [t0, t1). Throws on a degenerate window.
  double average_bandwidth(double t0_s, double t1_s) const;
  // Earliest t with delivered_kbits(start, t) == size. Throws HorizonError
  // if the trace ends first.
  double transfer_finish_time(double start_s, double size_kbits) const;

  std::span<const TracePoint> samples() const { return samples_; }
  double horizon_s() const { return horizon_s_; }

 private:
  std::size_t step_index(double time_s) const;
  double step_end(std::size_t k) const;

  std::vector<TracePoint> samples_;
  double horizon_s_;
};

// Reads `time_s,bandwidth_kbps` CSV.
BandwidthTrace parse_trace_csv(std::istream& in, double horizon_s);
BandwidthTrace load_trace_csv(const std::filesystem::path& path, double horizon_s);
void write_trace_csv(const BandwidthTrace& trace, std::ostream& out);

struct Path {
  int id = 0;
  std::vector<std::string> hops;
  BandwidthTrace trace;
};

struct PathSpec {
  std::vector<std::string> hops;
  BandwidthTrace trace;
};

// Server-to-client candidate paths. Paths are stable-sorted by hop count
// on construction, so path 0 is the minimum-hop path and equal-hop paths
// keep their declaration order; ids are positions in that order.
class Topology {
 public:
  static Topology Create(std::vector<std::string> switch_ids, std::string server_switch,
                         std::string client_switch, std::vector<PathSpec> paths);

  std::span<const std::string> switch_ids() const { return switch_ids_; }
  const std::string& server_switch() const { return server_switch_; }
  const std::string& client_switch() const { return client_switch_; }
  std::span<const Path> paths() const { return paths_; }
  const Path& path(int id) const;
  int num_paths() const { return static_cast<int>(paths_.size()); }
  // Shortest trace horizon across paths.
  double horizon_s() const;

 private:
  Topology() = default;

  std::vector<std::string> switch_ids_;
  std::string server_switch_;
  std::string client_switch_;
  std::vector<Path> paths_;
};

std::span<const Path> enumerate_paths(const Topology& topology);

// Scenario JSON: switches, endpoints, horizon and per-path trace files
// (resolved relative to the scenario file).
Topology load_scenario(const std::filesystem::path& path);

}  // namespace sdnabr
