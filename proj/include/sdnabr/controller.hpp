#pragma once

#include <limits>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sdnabr/netmodel.hpp"

namespace sdnabr {

enum class RoutingPolicy {
  kFixed,  // minimum-hop path, never changes
  kSpr,    // periodic probe-all-paths then hold the best for alpha periods
  kSar,    // probe only when the client asks, then hold indefinitely
  kSarm,   // kSar plus a threshold monitor on the active path
};

std::string_view to_string(RoutingPolicy policy);
RoutingPolicy parse_routing_policy(std::string_view name);

struct ControllerParams {
  RoutingPolicy policy = RoutingPolicy::kFixed;
  double switch_period_s = 2.0;
  int steady_multiplier = 1;
  double monitor_threshold_kbps = 1000.0;
  double monitor_interval_s = 1.0;

  void Validate() const;
  bool operator==(const ControllerParams&) const = default;
};

enum class Phase { kSwitching, kSteady, kIdle };

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct ControllerState {
  int active_path = 0;
  Phase phase = Phase::kIdle;
  int probe_index = 0;
  // End of the current probe period (switching) or hold (steady).
  double phase_deadline_s = kNever;
  // Next threshold check; only meaningful for kSarm while idle.
  double next_monitor_s = kNever;
  // Probe results of the current or most recent switching stage.
  std::map<int, double> measurements;
};

// Argmax of the measured bandwidths, lowest path id on ties.
int select_best_path(const std::map<int, double>& measurements);

// Length of one probe-and-hold cycle over n paths.
double spr_cycle_length(int num_paths, int steady_multiplier, double switch_period_s);

// Minimum-hop path.
int fixed_path(const Topology& topology);

ControllerState initial_controller_state(const ControllerParams& params, const Topology& topology);

// Processes every periodic-routing transition due at or before `now`.
std::pair<ControllerState, int> spr_tick(ControllerState state, const ControllerParams& params,
                                         double now, const Topology& topology);

// Client-triggered reroute: starts a switching stage unless one is running.
ControllerState sar_on_request(ControllerState state, const ControllerParams& params, double now,
                               const Topology& topology);

// Threshold check on the active path over the last monitor interval.
ControllerState sarm_monitor(ControllerState state, const ControllerParams& params, double now,
                             const Topology& topology);

struct PathChange {
  double time_s = 0.0;
  int path = 0;

  bool operator==(const PathChange&) const = default;
};

// Event-driven wrapper the session engine consults. Owns the state of one
// session; not shared across sessions.
class RoutingController {
 public:
  RoutingController(const ControllerParams& params, const Topology& topology);

  int active_path() const { return state_.active_path; }
  const ControllerState& state() const { return state_; }
  // Time of the next internal transition; kNever if the path cannot change
  // without a client request.
  double next_event_time() const;
  // Applies every transition due at or before `now`.
  void AdvanceTo(double now);
  // Reroute request from the client's assisted switch-down zone. Ignored by
  // the fixed and periodic policies.
  void RequestReroute(double now);
  // Every path assignment that changed the active path, starting at t = 0.
  std::span<const PathChange> path_changes() const { return changes_; }
  int reroute_requests() const { return reroute_requests_; }

 private:
  void Record(double time);

  ControllerParams params_;
  const Topology* topology_;
  ControllerState state_;
  std::vector<PathChange> changes_;
  int reroute_requests_ = 0;
};

}  // namespace sdnabr
