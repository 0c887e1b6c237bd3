#include "sdnabr/controller.hpp"

#include <gtest/gtest.h>

#include "sdnabr/errors.hpp"
#include "test_support.hpp"

namespace sdnabr {
namespace {

using testing::constant_trace;
using testing::topology_of;

ControllerParams params(RoutingPolicy policy) {
  ControllerParams p;
  p.policy = policy;
  return p;
}

// Four paths with distinct constant rates; path 2 is best.
Topology four_paths() {
  return topology_of({constant_trace(3000), constant_trace(8000), constant_trace(9000),
                      constant_trace(1000)});
}

TEST(SelectBestPathTest, Examples) {
  EXPECT_EQ(select_best_path({{0, 3000}, {1, 8000}, {2, 5000}, {3, 1000}}), 1);
  EXPECT_EQ(select_best_path({{0, 5000}, {1, 5000}}), 0);
  EXPECT_EQ(select_best_path({{2, 100}}), 2);
  EXPECT_THROW(select_best_path({}), std::invalid_argument);
}

TEST(CycleLengthTest, Examples) {
  EXPECT_DOUBLE_EQ(spr_cycle_length(4, 1, 2), 10);
  EXPECT_DOUBLE_EQ(spr_cycle_length(1, 0, 5), 5);
  EXPECT_DOUBLE_EQ(spr_cycle_length(4, 3, 2), 14);
}

TEST(FixedPathTest, IsMinimumHop) {
  std::vector<PathSpec> specs;
  specs.push_back({{"s2", "s3", "s4", "s1"}, constant_trace(1)});
  specs.push_back({{"s2", "s3", "s1"}, constant_trace(2)});
  specs.push_back({{"s2", "s4", "s1"}, constant_trace(3)});
  const Topology topo = Topology::Create({"s1", "s2", "s3", "s4"}, "s2", "s1", std::move(specs));
  EXPECT_EQ(topo.path(fixed_path(topo)).hops, (std::vector<std::string>{"s2", "s3", "s1"}));
  EXPECT_EQ(fixed_path(topology_of({constant_trace(5)})), 0);
}

TEST(SprTest, OneCycleByHand) {
  const Topology topo = four_paths();
  const ControllerParams p = params(RoutingPolicy::kSpr);
  ControllerState s = initial_controller_state(p, topo);
  const std::vector<std::pair<double, int>> expected{
      {0, 0}, {1.9, 0}, {2, 1}, {4, 2}, {6, 3}, {8, 2}, {9.9, 2}, {10, 0}, {12, 1}, {18, 2}};
  for (auto [now, path] : expected) {
    auto [next, active] = spr_tick(s, p, now, topo);
    EXPECT_EQ(active, path) << "now " << now;
    s = std::move(next);
  }
  EXPECT_EQ(s.measurements.at(1), 8000);
}

TEST(SprTest, SinglePathAndTies) {
  const ControllerParams p = params(RoutingPolicy::kSpr);
  const Topology one = topology_of({constant_trace(500)});
  ControllerState s = initial_controller_state(p, one);
  for (double now = 0; now < 50; now += 0.5) {
    auto [next, active] = spr_tick(s, p, now, one);
    EXPECT_EQ(active, 0);
    s = std::move(next);
  }
  const Topology flat = topology_of({constant_trace(700), constant_trace(700), constant_trace(700)});
  auto [state, active] = spr_tick(initial_controller_state(p, flat), p, 6.5, flat);
  EXPECT_EQ(state.phase, Phase::kSteady);
  EXPECT_EQ(active, 0);
}

TEST(SprTest, ZeroSteadyMultiplierRestartsImmediately) {
  const Topology topo = four_paths();
  ControllerParams p = params(RoutingPolicy::kSpr);
  p.steady_multiplier = 0;
  EXPECT_EQ(spr_tick(initial_controller_state(p, topo), p, 8, topo).second, 0);
  EXPECT_EQ(spr_tick(initial_controller_state(p, topo), p, 10, topo).second, 1);
}

TEST(SprTest, PeriodicOverLongRun) {
  const Topology topo = four_paths();
  const ControllerParams p = params(RoutingPolicy::kSpr);
  RoutingController c(p, topo);
  std::vector<int> trace;
  for (double now = 0; now < 300; now += 0.25) {
    c.AdvanceTo(now);
    trace.push_back(c.active_path());
  }
  const std::size_t period = 40;  // 10 s at 0.25 s steps
  for (std::size_t i = period; i < trace.size(); ++i) EXPECT_EQ(trace[i], trace[i - period]) << i;
}

TEST(SarTest, RequestProbesThenHolds) {
  const Topology topo = four_paths();
  const ControllerParams p = params(RoutingPolicy::kSar);
  RoutingController c(p, topo);
  c.AdvanceTo(100);
  EXPECT_EQ(c.active_path(), 0);
  EXPECT_EQ(c.next_event_time(), kNever);
  c.RequestReroute(100);
  const std::vector<std::pair<double, int>> expected{
      {100, 0}, {101.9, 0}, {102, 1}, {104, 2}, {106, 3}, {107.99, 3}, {108, 2}, {500, 2}};
  for (auto [now, path] : expected) {
    c.AdvanceTo(now);
    EXPECT_EQ(c.active_path(), path) << "now " << now;
  }
  EXPECT_EQ(c.state().phase, Phase::kIdle);
  EXPECT_EQ(c.reroute_requests(), 1);
}

TEST(SarTest, RequestsDuringAStageCoalesce) {
  const Topology topo = four_paths();
  const ControllerParams p = params(RoutingPolicy::kSar);
  ControllerState s = initial_controller_state(p, topo);
  s = sar_on_request(std::move(s), p, 100, topo);
  const double deadline = s.phase_deadline_s;
  s = spr_tick(std::move(s), p, 101, topo).first;
  s = sar_on_request(std::move(s), p, 101, topo);
  EXPECT_EQ(s.phase_deadline_s, deadline);
  EXPECT_EQ(s.probe_index, 0);
  // Stage completes on schedule.
  s = spr_tick(std::move(s), p, 108, topo).first;
  EXPECT_EQ(s.phase, Phase::kIdle);
  EXPECT_EQ(s.active_path, 2);
}

TEST(SarTest, PassiveWithoutRequests) {
  const Topology topo = four_paths();
  RoutingController c(params(RoutingPolicy::kSar), topo);
  for (double now = 0; now < 1000; now += 7) c.AdvanceTo(now);
  EXPECT_EQ(c.path_changes().size(), 1u);
  EXPECT_EQ(c.active_path(), 0);
}

TEST(SarTest, FixedAndPeriodicIgnoreRequests) {
  const Topology topo = four_paths();
  RoutingController fixed(params(RoutingPolicy::kFixed), topo);
  fixed.RequestReroute(5);
  EXPECT_EQ(fixed.active_path(), 0);
  EXPECT_EQ(fixed.state().phase, Phase::kIdle);
  EXPECT_EQ(fixed.reroute_requests(), 1);

  const ControllerParams p = params(RoutingPolicy::kSpr);
  ControllerState s = spr_tick(initial_controller_state(p, topo), p, 8.5, topo).first;
  const ControllerState after = sar_on_request(s, p, 8.5, topo);
  EXPECT_EQ(after.phase, Phase::kSteady);
  EXPECT_EQ(after.active_path, 2);
}

Topology congested_first(double rate) {
  return topology_of({constant_trace(rate), constant_trace(5000)});
}

TEST(SarmTest, ReroutesBelowThreshold) {
  const ControllerParams p = params(RoutingPolicy::kSarm);
  const Topology topo = congested_first(800);
  const ControllerState s = sarm_monitor(initial_controller_state(p, topo), p, 1, topo);
  EXPECT_EQ(s.phase, Phase::kSwitching);
}

TEST(SarmTest, ThresholdIsStrict) {
  const ControllerParams p = params(RoutingPolicy::kSarm);
  const Topology topo = congested_first(1000);
  const ControllerState s = sarm_monitor(initial_controller_state(p, topo), p, 1, topo);
  EXPECT_EQ(s.phase, Phase::kIdle);
  EXPECT_DOUBLE_EQ(s.next_monitor_s, 2);
}

TEST(SarmTest, SuspendedWhileSwitching) {
  const ControllerParams p = params(RoutingPolicy::kSarm);
  const Topology topo = congested_first(100);
  ControllerState s = sar_on_request(initial_controller_state(p, topo), p, 10, topo);
  const ControllerState again = sarm_monitor(s, p, 11, topo);
  EXPECT_EQ(again.phase_deadline_s, s.phase_deadline_s);
  EXPECT_EQ(again.probe_index, 0);
  EXPECT_EQ(again.next_monitor_s, kNever);
}

TEST(SarmTest, ControllerEscapesCongestionUnprompted) {
  // Path 0 collapses at t = 30; the monitor notices within one interval and
  // the following probe stage moves to path 1.
  const Topology topo = topology_of({BandwidthTrace({{0, 9000}, {30, 300}}, 1000),
                                     constant_trace(5000, 1000)});
  RoutingController c(params(RoutingPolicy::kSarm), topo);
  c.AdvanceTo(30.5);
  EXPECT_EQ(c.active_path(), 0);
  c.AdvanceTo(31);
  EXPECT_EQ(c.state().phase, Phase::kSwitching);
  c.AdvanceTo(35);
  EXPECT_EQ(c.active_path(), 1);
  EXPECT_EQ(c.state().phase, Phase::kIdle);
  EXPECT_EQ(c.path_changes().back(), (PathChange{33, 1}));  // probing path 1
  // A healthy path keeps the monitor quiet.
  c.AdvanceTo(500);
  EXPECT_EQ(c.active_path(), 1);
}

TEST(ControllerTest, ParamsValidate) {
  ControllerParams p;
  p.switch_period_s = 0;
  EXPECT_THROW(p.Validate(), ValidationError);
  p = {};
  p.steady_multiplier = -1;
  EXPECT_THROW(p.Validate(), ValidationError);
  p = params(RoutingPolicy::kSarm);
  p.monitor_interval_s = 0;
  EXPECT_THROW(p.Validate(), ValidationError);
  EXPECT_THROW(RoutingController(p, four_paths()), ValidationError);
}

TEST(ControllerTest, PolicyNames) {
  for (auto policy : {RoutingPolicy::kFixed, RoutingPolicy::kSpr, RoutingPolicy::kSar, RoutingPolicy::kSarm}) {
    EXPECT_EQ(parse_routing_policy(to_string(policy)), policy);
  }
  EXPECT_THROW(parse_routing_policy("ospf"), ValidationError);
}

}  // namespace
}  // namespace sdnabr
