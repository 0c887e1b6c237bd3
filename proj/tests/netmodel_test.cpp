#include "sdnabr/netmodel.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "sdnabr/errors.hpp"
#include "test_support.hpp"

namespace sdnabr {
namespace {

using testing::constant_trace;
using testing::topology_of;

const std::filesystem::path kData = SDNABR_DATA_DIR;

// Independent oracle: rate at t by linear scan of the raw breakpoints.
double oracle_rate(const std::vector<TracePoint>& pts, double t) {
  double rate = pts.front().bandwidth_kbps;
  for (const auto& p : pts) {
    if (p.start_s <= t) rate = p.bandwidth_kbps;
  }
  return rate;
}

// 1 ms forward integration; the finish instant is interpolated inside the
// step that completes the transfer.
double oracle_finish(const std::vector<TracePoint>& pts, double start, double size) {
  const double dt = 1e-3;
  double t = start;
  double left = size;
  for (;;) {
    const double r = oracle_rate(pts, t + dt / 2);
    if (r * dt >= left) return t + left / r;
    left -= r * dt;
    t += dt;
  }
}

TEST(TraceTest, LookupIsLeftClosed) {
  const BandwidthTrace single({{0, 1000}}, 100);
  EXPECT_DOUBLE_EQ(single.bandwidth_at(5), 1000);
  const BandwidthTrace two({{0, 1000}, {10, 3000}}, 100);
  EXPECT_DOUBLE_EQ(two.bandwidth_at(10), 3000);
  EXPECT_DOUBLE_EQ(two.bandwidth_at(9.999), 1000);
  EXPECT_DOUBLE_EQ(two.bandwidth_at(100), 3000);
}

TEST(TraceTest, LookupOutsideHorizonThrows) {
  const BandwidthTrace t({{0, 1000}}, 100);
  EXPECT_THROW(t.bandwidth_at(-0.5), HorizonError);
  EXPECT_THROW(t.bandwidth_at(100.5), HorizonError);
}

TEST(TraceTest, AverageBandwidth) {
  EXPECT_DOUBLE_EQ(constant_trace(1000).average_bandwidth(3, 17), 1000);
  EXPECT_DOUBLE_EQ(BandwidthTrace({{0, 1000}, {1, 3000}}, 10).average_bandwidth(0, 2), 2000);
  // Hand integral: 500 + 500 + 8000 over three seconds.
  EXPECT_DOUBLE_EQ(BandwidthTrace({{0, 500}, {1, 500}, {2, 8000}}, 10).average_bandwidth(0, 3), 3000);
  EXPECT_THROW(constant_trace(1000).average_bandwidth(2, 2), std::invalid_argument);
}

TEST(TraceTest, TransferFinishTime) {
  EXPECT_DOUBLE_EQ(constant_trace(1000).transfer_finish_time(0, 2000), 2.0);
  // 1000 kbits in the first second, the remaining 3000 at 3000 kbps.
  EXPECT_DOUBLE_EQ(BandwidthTrace({{0, 1000}, {1, 3000}}, 10).transfer_finish_time(0, 4000), 2.0);
  // Zero-rate steps are crossed, not stalled on.
  EXPECT_DOUBLE_EQ(BandwidthTrace({{0, 0}, {5, 100}}, 20).transfer_finish_time(1, 100), 6.0);
}

TEST(TraceTest, TransferPastHorizonThrows) {
  const BandwidthTrace t({{0, 1000}, {5, 0}}, 10);
  EXPECT_THROW(t.transfer_finish_time(0, 6000), HorizonError);
  EXPECT_THROW(t.transfer_finish_time(11, 1), HorizonError);
  EXPECT_THROW(t.transfer_finish_time(0, 0), std::invalid_argument);
}

TEST(TraceTest, RoundTripAgainstAverage) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(0, 20000), gap(0.1, 8), frac(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TracePoint> pts{{0, rate(rng)}};
    for (int k = 0; k < 8; ++k) pts.push_back({pts.back().start_s + gap(rng), rate(rng)});
    const double horizon = pts.back().start_s + 10;
    const BandwidthTrace trace(pts, horizon);
    const double s = frac(rng) * horizon * 0.5;
    const double t = s + 0.01 + frac(rng) * (horizon - s - 0.01);
    const double size = trace.average_bandwidth(s, t) * (t - s);
    if (size <= 1e-6) continue;
    // The trace may be idle just before t; the identity then pins the
    // finish to the end of the last busy stretch, not beyond t.
    const double finish = trace.transfer_finish_time(s, size);
    EXPECT_LE(finish, t + 1e-9);
    EXPECT_NEAR(trace.delivered_kbits(s, finish), size, 1e-6 * size);
    if (trace.bandwidth_at(std::nextafter(t, 0.0)) > 0) EXPECT_NEAR(finish, t, 1e-9);
  }
}

TEST(TraceTest, MatchesBruteForceIntegrator) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rate(100, 20000), gap(0.2, 4), frac(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<TracePoint> pts{{0, rate(rng)}};
    for (int k = 0; k < 6; ++k) pts.push_back({pts.back().start_s + gap(rng), rate(rng)});
    const BandwidthTrace trace(pts, pts.back().start_s + 100);
    const double start = frac(rng) * pts.back().start_s;
    const double size = 1000 + frac(rng) * 40000;
    const double exact = trace.transfer_finish_time(start, size);
    const double brute = oracle_finish(pts, start, size);
    EXPECT_NEAR(exact, brute, 1e-3 * (exact - start)) << "trial " << trial;
  }
}

TEST(TraceTest, ConstructorValidates) {
  EXPECT_THROW(BandwidthTrace({}, 10), ValidationError);
  EXPECT_THROW(BandwidthTrace({{1, 10}}, 10), ValidationError);
  EXPECT_THROW(BandwidthTrace({{0, 10}, {0, 20}}, 10), ValidationError);
  EXPECT_THROW(BandwidthTrace({{0, -1}}, 10), ValidationError);
  EXPECT_THROW(BandwidthTrace({{0, 10}, {5, 20}}, 5), ValidationError);
}

TEST(TraceTest, CsvRoundTrip) {
  std::istringstream in("time_s,bandwidth_kbps\n0,1500\n2.5,300\n");
  const BandwidthTrace t = parse_trace_csv(in, 20);
  ASSERT_EQ(t.samples().size(), 2u);
  EXPECT_EQ(t.samples()[1], (TracePoint{2.5, 300}));
  std::ostringstream out;
  write_trace_csv(t, out);
  std::istringstream again(out.str());
  const BandwidthTrace u = parse_trace_csv(again, 20);
  EXPECT_TRUE(std::equal(t.samples().begin(), t.samples().end(), u.samples().begin()));
}

TEST(TraceTest, CsvRejectsMalformedInput) {
  std::istringstream bad_header("t,bw\n0,1\n");
  EXPECT_THROW(parse_trace_csv(bad_header, 10), ValidationError);
  std::istringstream bad_number("time_s,bandwidth_kbps\n0,abc\n");
  EXPECT_THROW(parse_trace_csv(bad_number, 10), ValidationError);
  std::istringstream bad_columns("time_s,bandwidth_kbps\n0\n");
  EXPECT_THROW(parse_trace_csv(bad_columns, 10), ValidationError);
}

TEST(TopologyTest, BundledScenarioPathOrder) {
  const Topology topo = load_scenario(kData / "fig5_scenario.json");
  const auto paths = enumerate_paths(topo);
  ASSERT_EQ(paths.size(), 4u);
  EXPECT_EQ(paths[0].hops, (std::vector<std::string>{"s2", "s3", "s1"}));
  EXPECT_EQ(paths[1].hops, (std::vector<std::string>{"s2", "s3", "s4", "s1"}));
  EXPECT_EQ(paths[2].hops, (std::vector<std::string>{"s2", "s5", "s3", "s1"}));
  EXPECT_EQ(paths[3].hops, (std::vector<std::string>{"s2", "s5", "s3", "s4", "s1"}));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(paths[static_cast<std::size_t>(i)].id, i);
}

TEST(TopologyTest, BundledScenarioShape) {
  // Shortest path congested below 500 kbps through the middle of the
  // session, some alternative always at >= 12000, everything ample at the end.
  const Topology topo = load_scenario(kData / "fig5_scenario.json");
  for (double t = 100; t < 490; t += 0.5) {
    EXPECT_LT(topo.path(0).trace.bandwidth_at(t), 500) << t;
    double best_alt = 0;
    for (int p = 1; p < topo.num_paths(); ++p) best_alt = std::max(best_alt, topo.path(p).trace.bandwidth_at(t));
    EXPECT_GE(best_alt, 12000) << t;
  }
  for (double t = 490; t < topo.horizon_s(); t += 5) {
    for (int p = 0; p < topo.num_paths(); ++p) EXPECT_GE(topo.path(p).trace.bandwidth_at(t), 15227);
  }
}

TEST(TopologyTest, SinglePathAndTieOrder) {
  const Topology one = topology_of({constant_trace(100)});
  EXPECT_EQ(enumerate_paths(one).size(), 1u);
  EXPECT_EQ(enumerate_paths(one)[0].id, 0);

  // Two 3-hop paths declared after a 4-hop one keep their relative order.
  std::vector<PathSpec> specs;
  specs.push_back({{"a", "x", "y", "b"}, constant_trace(1)});
  specs.push_back({{"a", "y", "b"}, constant_trace(2)});
  specs.push_back({{"a", "x", "b"}, constant_trace(3)});
  const Topology topo = Topology::Create({"a", "b", "x", "y"}, "a", "b", std::move(specs));
  EXPECT_EQ(topo.path(0).hops, (std::vector<std::string>{"a", "y", "b"}));
  EXPECT_EQ(topo.path(1).hops, (std::vector<std::string>{"a", "x", "b"}));
  EXPECT_EQ(topo.path(2).hops.size(), 4u);
}

TEST(TopologyTest, CreateValidates) {
  auto spec = [](std::vector<std::string> hops) { return PathSpec{std::move(hops), constant_trace(1)}; };
  EXPECT_THROW(Topology::Create({"a", "a"}, "a", "a", {spec({"a"})}), ValidationError);
  EXPECT_THROW(Topology::Create({"a", "b"}, "z", "b", {spec({"a", "b"})}), ValidationError);
  EXPECT_THROW(Topology::Create({"a", "b"}, "a", "b", {}), ValidationError);
  EXPECT_THROW(Topology::Create({"a", "b"}, "a", "b", {spec({"a", "q", "b"})}), ValidationError);
  EXPECT_THROW(Topology::Create({"a", "b"}, "a", "b", {spec({"b", "a"})}), ValidationError);
  EXPECT_THROW(Topology::Create({"a", "b"}, "a", "b", {spec({"a", "b"}), spec({"a", "b"})}),
               ValidationError);
}

TEST(TopologyTest, HorizonIsShortestTrace) {
  const Topology topo = topology_of({constant_trace(1, 50), constant_trace(1, 30)});
  EXPECT_DOUBLE_EQ(topo.horizon_s(), 30);
  EXPECT_THROW(topo.path(2), std::out_of_range);
}

TEST(TopologyTest, MissingScenarioFile) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ValidationError);
}

}  // namespace
}  // namespace sdnabr
