#include "sdnabr/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sdnabr/errors.hpp"

namespace sdnabr {

BandwidthTrace::BandwidthTrace(std::vector<TracePoint> samples, double horizon_s)
    : samples_(std::move(samples)), horizon_s_(horizon_s) {
  if (samples_.empty()) throw ValidationError("trace: needs at least one breakpoint");
  if (samples_.front().start_s != 0.0) throw ValidationError("trace: first breakpoint must be at t = 0");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const TracePoint& p = samples_[k];
    if (!std::isfinite(p.bandwidth_kbps) || p.bandwidth_kbps < 0.0) {
      throw ValidationError("trace: row " + std::to_string(k) + ": bandwidth must be >= 0");
    }
    if (k > 0 && !(p.start_s > samples_[k - 1].start_s)) {
      throw ValidationError("trace: row " + std::to_string(k) + ": times must be strictly increasing");
    }
  }
  if (!(horizon_s_ > samples_.back().start_s) || !std::isfinite(horizon_s_)) {
    throw ValidationError("trace: horizon must lie beyond the last breakpoint");
  }
}

std::size_t BandwidthTrace::step_index(double time_s) const {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), time_s,
                             [](double t, const TracePoint& p) { return t < p.start_s; });
  return static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
}

double BandwidthTrace::step_end(std::size_t k) const {
  return k + 1 < samples_.size() ? samples_[k + 1].start_s : horizon_s_;
}

double BandwidthTrace::bandwidth_at(double time_s) const {
  if (!(time_s >= 0.0) || time_s > horizon_s_) {
    throw HorizonError("bandwidth_at: time " + std::to_string(time_s) + " outside [0, horizon]");
  }
  return samples_[step_index(time_s)].bandwidth_kbps;
}

double BandwidthTrace::delivered_kbits(double t0_s, double t1_s) const {
  if (!(t0_s >= 0.0) || t1_s > horizon_s_ || t1_s < t0_s) {
    throw HorizonError("delivered_kbits: window outside [0, horizon]");
  }
  double total = 0.0;
  std::size_t k = step_index(t0_s);
  double t = t0_s;
  while (t < t1_s) {
    const double end = std::min(step_end(k), t1_s);
    total += samples_[k].bandwidth_kbps * (end - t);
    t = end;
    ++k;
  }
  return total;
}

double BandwidthTrace::average_bandwidth(double t0_s, double t1_s) const {
  if (!(t1_s > t0_s)) throw std::invalid_argument("average_bandwidth: empty window");
  return delivered_kbits(t0_s, t1_s) / (t1_s - t0_s);
}

double BandwidthTrace::transfer_finish_time(double start_s, double size_kbits) const {
  if (!(size_kbits > 0.0)) throw std::invalid_argument("transfer_finish_time: size must be positive");
  if (!(start_s >= 0.0) || start_s > horizon_s_) {
    throw HorizonError("transfer_finish_time: start outside [0, horizon]");
  }
  double remaining = size_kbits;
  double t = start_s;
  for (std::size_t k = step_index(start_s); k < samples_.size(); ++k) {
    const double end = step_end(k);
    const double rate = samples_[k].bandwidth_kbps;
    if (rate > 0.0) {
      const double capacity = rate * (end - t);
      if (capacity >= remaining) return t + remaining / rate;
      remaining -= capacity;
    }
    t = end;
  }
  std::ostringstream msg;
  msg << "stalled link: " << remaining << " of " << size_kbits
      << " kbits undelivered at horizon " << horizon_s_ << " s";
  throw HorizonError(msg.str());
}

BandwidthTrace parse_trace_csv(std::istream& in, double horizon_s) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_s,bandwidth_kbps") {
    throw ValidationError("trace: expected header 'time_s,bandwidth_kbps', got '" + line + "'");
  }
  std::vector<TracePoint> samples;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("trace: row " + std::to_string(row) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      const std::string time_text = line.substr(0, comma);
      const std::string rate_text = line.substr(comma + 1);
      const double time = std::stod(time_text, &used);
      if (used != time_text.size()) throw std::invalid_argument(time_text);
      const double rate = std::stod(rate_text, &used);
      if (used != rate_text.size()) throw std::invalid_argument(rate_text);
      samples.push_back({time, rate});
    } catch (const std::logic_error&) {
      throw ValidationError("trace: row " + std::to_string(row) + ": malformed number");
    }
  }
  return BandwidthTrace(std::move(samples), horizon_s);
}

BandwidthTrace load_trace_csv(const std::filesystem::path& path, double horizon_s) {
  std::ifstream in(path);
  if (!in) throw ValidationError("trace: cannot open " + path.string());
  try {
    return parse_trace_csv(in, horizon_s);
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

void write_trace_csv(const BandwidthTrace& trace, std::ostream& out) {
  out << "time_s,bandwidth_kbps\n";
  for (const TracePoint& p : trace.samples()) {
    out << p.start_s << ',' << p.bandwidth_kbps << '\n';
  }
}

Topology Topology::Create(std::vector<std::string> switch_ids, std::string server_switch,
                          std::string client_switch, std::vector<PathSpec> paths) {
  const std::set<std::string> known(switch_ids.begin(), switch_ids.end());
  if (known.size() != switch_ids.size()) throw ValidationError("switches: duplicate switch id");
  if (!known.count(server_switch)) throw ValidationError("server_switch: unknown switch " + server_switch);
  if (!known.count(client_switch)) throw ValidationError("client_switch: unknown switch " + client_switch);
  if (paths.empty()) throw ValidationError("paths: at least one path is required");

  std::set<std::vector<std::string>> seen;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& hops = paths[i].hops;
    const std::string label = "paths[" + std::to_string(i) + "]";
    if (hops.empty()) throw ValidationError(label + ".hops: empty");
    for (const auto& hop : hops) {
      if (!known.count(hop)) throw ValidationError(label + ".hops: unknown switch " + hop);
    }
    if (hops.front() != server_switch || hops.back() != client_switch) {
      throw ValidationError(label + ".hops: must run from the server switch to the client switch");
    }
    if (!seen.insert(hops).second) throw ValidationError(label + ".hops: duplicate path");
  }

  std::stable_sort(paths.begin(), paths.end(), [](const PathSpec& a, const PathSpec& b) {
    return a.hops.size() < b.hops.size();
  });

  Topology topo;
  topo.switch_ids_ = std::move(switch_ids);
  topo.server_switch_ = std::move(server_switch);
  topo.client_switch_ = std::move(client_switch);
  topo.paths_.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    topo.paths_.push_back(Path{static_cast<int>(i), std::move(paths[i].hops), std::move(paths[i].trace)});
  }
  return topo;
}

const Path& Topology::path(int id) const {
  if (id < 0 || id >= num_paths()) throw std::out_of_range("path id " + std::to_string(id));
  return paths_[static_cast<std::size_t>(id)];
}

double Topology::horizon_s() const {
  double horizon = std::numeric_limits<double>::infinity();
  for (const Path& p : paths_) horizon = std::min(horizon, p.trace.horizon_s());
  return horizon;
}

std::span<const Path> enumerate_paths(const Topology& topology) { return topology.paths(); }

Topology load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario: " + std::string(e.what()));
  }
  const auto base = path.parent_path();
  try {
    const double horizon = doc.at("horizon_s").get<double>();
    std::vector<PathSpec> paths;
    for (const auto& item : doc.at("paths")) {
      auto hops = item.at("hops").get<std::vector<std::string>>();
      const auto trace_file = base / item.at("trace").get<std::string>();
      paths.push_back(PathSpec{std::move(hops), load_trace_csv(trace_file, horizon)});
    }
    return Topology::Create(doc.at("switches").get<std::vector<std::string>>(),
                            doc.at("server_switch").get<std::string>(),
                            doc.at("client_switch").get<std::string>(), std::move(paths));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("scenario: " + std::string(e.what()));
  }
}

}  // namespace sdnabr
