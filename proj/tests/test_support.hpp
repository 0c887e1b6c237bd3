#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdnabr/catalog.hpp"
#include "sdnabr/netmodel.hpp"

namespace sdnabr::testing {

// Constant-bitrate catalog on the reference ladder.
inline VideoCatalog cbr_ladder(int num_segments, double duration_s = 2.0) {
  std::vector<Version> versions;
  for (std::size_t i = 0; i < kReferenceLadderKbps.size(); ++i) {
    versions.push_back({static_cast<int>(i), kReferenceLadderQp[i], kReferenceLadderKbps[i],
                        std::vector<double>(static_cast<std::size_t>(num_segments),
                                            kReferenceLadderKbps[i])});
  }
  return VideoCatalog::Create(duration_s, std::move(versions));
}

inline BandwidthTrace constant_trace(double kbps, double horizon_s = 10000.0) {
  return BandwidthTrace({{0.0, kbps}}, horizon_s);
}

inline std::vector<std::string> hops_for(int i) {
  // Distinct paths s2 -> ... -> s1 with hop count growing with i.
  std::vector<std::string> hops{"s2"};
  for (int k = 0; k <= i; ++k) hops.push_back("x" + std::to_string(i) + "_" + std::to_string(k));
  hops.push_back("s1");
  return hops;
}

// Topology whose path i uses traces[i]; path ids follow the vector order.
inline Topology topology_of(std::vector<BandwidthTrace> traces) {
  std::vector<std::string> switches{"s1", "s2"};
  std::vector<PathSpec> specs;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    auto hops = hops_for(static_cast<int>(i));
    for (std::size_t h = 1; h + 1 < hops.size(); ++h) switches.push_back(hops[h]);
    specs.push_back({std::move(hops), std::move(traces[i])});
  }
  return Topology::Create(std::move(switches), "s2", "s1", std::move(specs));
}

}  // namespace sdnabr::testing
