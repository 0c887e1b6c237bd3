#include "sdnabr/controller.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "sdnabr/errors.hpp"

namespace sdnabr {
namespace {

bool is_adaptive(RoutingPolicy policy) {
  return policy == RoutingPolicy::kSar || policy == RoutingPolicy::kSarm;
}

void start_switching_stage(ControllerState& state, const ControllerParams& params, double at) {
  state.phase = Phase::kSwitching;
  state.probe_index = 0;
  state.active_path = 0;
  state.measurements.clear();
  state.phase_deadline_s = at + params.switch_period_s;
  state.next_monitor_s = kNever;
}

// Closes the probe period or steady hold that ends at state.phase_deadline_s.
void finish_phase(ControllerState& state, const ControllerParams& params, const Topology& topology) {
  const double at = state.phase_deadline_s;
  if (state.phase == Phase::kSteady) {
    start_switching_stage(state, params, at);
    return;
  }
  const Path& probed = topology.path(state.probe_index);
  state.measurements[state.probe_index] =
      probed.trace.average_bandwidth(at - params.switch_period_s, at);
  ++state.probe_index;
  if (state.probe_index < topology.num_paths()) {
    state.active_path = state.probe_index;
    state.phase_deadline_s = at + params.switch_period_s;
    return;
  }

  const int best = select_best_path(state.measurements);
  if (params.policy == RoutingPolicy::kSpr) {
    if (params.steady_multiplier == 0) {
      start_switching_stage(state, params, at);
      return;
    }
    state.phase = Phase::kSteady;
    state.active_path = best;
    state.phase_deadline_s = at + params.steady_multiplier * params.switch_period_s;
    return;
  }
  state.phase = Phase::kIdle;
  state.active_path = best;
  state.phase_deadline_s = kNever;
  state.next_monitor_s =
      params.policy == RoutingPolicy::kSarm ? at + params.monitor_interval_s : kNever;
}

}  // namespace

std::string_view to_string(RoutingPolicy policy) {
  switch (policy) {
    case RoutingPolicy::kFixed: return "fixed";
    case RoutingPolicy::kSpr: return "spr";
    case RoutingPolicy::kSar: return "sar";
    case RoutingPolicy::kSarm: return "sarm";
  }
  return "fixed";
}

RoutingPolicy parse_routing_policy(std::string_view name) {
  if (name == "fixed") return RoutingPolicy::kFixed;
  if (name == "spr") return RoutingPolicy::kSpr;
  if (name == "sar") return RoutingPolicy::kSar;
  if (name == "sarm") return RoutingPolicy::kSarm;
  throw ValidationError("policy: unknown routing policy '" + std::string(name) + "'");
}

void ControllerParams::Validate() const {
  if (!(switch_period_s > 0.0)) throw ValidationError("switch_period_s: must be positive");
  if (steady_multiplier < 0) throw ValidationError("steady_multiplier: must be >= 0");
  if (policy == RoutingPolicy::kSarm) {
    if (!(monitor_threshold_kbps > 0.0)) {
      throw ValidationError("monitor_threshold_kbps: must be positive for sarm");
    }
    if (!(monitor_interval_s > 0.0)) throw ValidationError("monitor_interval_s: must be positive");
  }
}

int select_best_path(const std::map<int, double>& measurements) {
  if (measurements.empty()) throw std::invalid_argument("select_best_path: no measurements");
  auto best = measurements.begin();
  for (auto it = std::next(best); it != measurements.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

double spr_cycle_length(int num_paths, int steady_multiplier, double switch_period_s) {
  return (num_paths + steady_multiplier) * switch_period_s;
}

int fixed_path(const Topology& topology) { return enumerate_paths(topology).front().id; }

ControllerState initial_controller_state(const ControllerParams& params, const Topology& topology) {
  ControllerState state;
  state.active_path = fixed_path(topology);
  switch (params.policy) {
    case RoutingPolicy::kFixed:
    case RoutingPolicy::kSar:
      break;
    case RoutingPolicy::kSpr:
      start_switching_stage(state, params, 0.0);
      break;
    case RoutingPolicy::kSarm:
      state.next_monitor_s = params.monitor_interval_s;
      break;
  }
  return state;
}

std::pair<ControllerState, int> spr_tick(ControllerState state, const ControllerParams& params,
                                         double now, const Topology& topology) {
  while (state.phase != Phase::kIdle && state.phase_deadline_s <= now) {
    finish_phase(state, params, topology);
  }
  const int active = state.active_path;
  return {std::move(state), active};
}

ControllerState sar_on_request(ControllerState state, const ControllerParams& params, double now,
                               const Topology&) {
  if (!is_adaptive(params.policy) || state.phase == Phase::kSwitching) return state;
  start_switching_stage(state, params, now);
  return state;
}

ControllerState sarm_monitor(ControllerState state, const ControllerParams& params, double now,
                             const Topology& topology) {
  if (params.policy != RoutingPolicy::kSarm || state.phase != Phase::kIdle) return state;
  state.next_monitor_s = now + params.monitor_interval_s;
  const double from = std::max(0.0, now - params.monitor_interval_s);
  if (!(now > from)) return state;
  const double measured = topology.path(state.active_path).trace.average_bandwidth(from, now);
  if (measured < params.monitor_threshold_kbps) {
    return sar_on_request(std::move(state), params, now, topology);
  }
  return state;
}

RoutingController::RoutingController(const ControllerParams& params, const Topology& topology)
    : params_(params), topology_(&topology) {
  params_.Validate();
  state_ = initial_controller_state(params_, topology);
  Record(0.0);
}

double RoutingController::next_event_time() const {
  if (state_.phase != Phase::kIdle) return state_.phase_deadline_s;
  if (params_.policy == RoutingPolicy::kSarm) return state_.next_monitor_s;
  return kNever;
}

void RoutingController::AdvanceTo(double now) {
  for (double next = next_event_time(); next <= now; next = next_event_time()) {
    if (state_.phase != Phase::kIdle) {
      finish_phase(state_, params_, *topology_);
    } else {
      state_ = sarm_monitor(std::move(state_), params_, next, *topology_);
    }
    Record(next);
  }
}

void RoutingController::RequestReroute(double now) {
  AdvanceTo(now);
  ++reroute_requests_;
  state_ = sar_on_request(std::move(state_), params_, now, *topology_);
  Record(now);
}

void RoutingController::Record(double time) {
  if (changes_.empty() || changes_.back().path != state_.active_path) {
    changes_.push_back({time, state_.active_path});
  }
}

}  // namespace sdnabr
