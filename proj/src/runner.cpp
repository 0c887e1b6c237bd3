#include "sdnabr/runner.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "sdnabr/errors.hpp"

namespace sdnabr {
namespace {

using nlohmann::json;

// Reads optional typed fields from a JSON object and rejects unknown keys.
class FieldReader {
 public:
  FieldReader(const json& doc, std::string prefix) : doc_(doc), prefix_(std::move(prefix)) {
    if (!doc_.is_null() && !doc_.is_object()) throw ValidationError(prefix_ + ": expected an object");
  }

  template <typename T>
  void Optional(const char* key, T& out) {
    seen_.insert(key);
    if (doc_.is_null() || !doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(Field(key) + ": wrong type");
    }
  }

  template <typename T>
  T Required(const char* key) {
    seen_.insert(key);
    if (doc_.is_null() || !doc_.contains(key)) throw ValidationError(Field(key) + ": missing");
    T out{};
    Optional(key, out);
    return out;
  }

  // Marks a key handled elsewhere, e.g. a nested object.
  void Allow(const char* key) { seen_.insert(key); }

  void RejectUnknown() const {
    if (doc_.is_null()) return;
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) throw ValidationError(Field(item.key().c_str()) + ": unknown field");
    }
  }

  std::string Field(const char* key) const { return prefix_ + "." + key; }

 private:
  const json& doc_;
  std::string prefix_;
  std::set<std::string> seen_;
};

template <typename Params>
void validate_as(const Params& params, const std::string& prefix) {
  try {
    params.Validate();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + "." + e.what());
  }
}

const json& member_or_null(const json& doc, const char* key) {
  static const json kNull;
  return doc.contains(key) ? doc.at(key) : kNull;
}

std::string format_number(double value) { return json(value).dump(); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunSpec parse_run_spec(const json& doc, const std::string& prefix) {
  FieldReader run(doc, prefix);
  RunSpec spec;
  spec.name = run.Required<std::string>("name");
  if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos || spec.name == "." ||
      spec.name == "..") {
    throw ValidationError(run.Field("name") + ": must be a plain directory name");
  }
  try {
    spec.algorithm = parse_algorithm(run.Required<std::string>("algorithm"));
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + "." + e.what());
  }
  run.Optional("start_version", spec.start_version);

  const json& algo_doc = member_or_null(doc, "algorithm_params");
  FieldReader algo(algo_doc, prefix + ".algorithm_params");
  run.Allow("algorithm_params");
  switch (spec.algorithm) {
    case Algorithm::kVasr:
      algo.Optional("b_low_s", spec.vasr.b_low_s);
      algo.Optional("b_high_s", spec.vasr.b_high_s);
      algo.Optional("b_max_s", spec.vasr.b_max_s);
      algo.Optional("delta0", spec.vasr.delta0);
      algo.Optional("gamma", spec.vasr.gamma);
      algo.Optional("mu", spec.vasr.mu);
      algo.Optional("assisted_cap_at_current", spec.vasr.assisted_cap_at_current);
      validate_as(spec.vasr, prefix + ".algorithm_params");
      break;
    case Algorithm::kAggressive:
      algo.Optional("b_max_s", spec.aggressive.b_max_s);
      validate_as(spec.aggressive, prefix + ".algorithm_params");
      break;
    case Algorithm::kSara:
      algo.Optional("i_s", spec.sara.i_s);
      algo.Optional("b_alpha_s", spec.sara.b_alpha_s);
      algo.Optional("b_beta_s", spec.sara.b_beta_s);
      algo.Optional("b_max_s", spec.sara.b_max_s);
      algo.Optional("history_window", spec.sara.history_window);
      validate_as(spec.sara, prefix + ".algorithm_params");
      break;
  }
  algo.RejectUnknown();

  try {
    spec.controller.policy = parse_routing_policy(run.Required<std::string>("policy"));
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + "." + e.what());
  }
  const json& policy_doc = member_or_null(doc, "policy_params");
  FieldReader policy(policy_doc, prefix + ".policy_params");
  run.Allow("policy_params");
  switch (spec.controller.policy) {
    case RoutingPolicy::kFixed:
      break;
    case RoutingPolicy::kSpr:
      policy.Optional("switch_period_s", spec.controller.switch_period_s);
      policy.Optional("steady_multiplier", spec.controller.steady_multiplier);
      break;
    case RoutingPolicy::kSarm:
      policy.Optional("monitor_threshold_kbps", spec.controller.monitor_threshold_kbps);
      policy.Optional("monitor_interval_s", spec.controller.monitor_interval_s);
      [[fallthrough]];
    case RoutingPolicy::kSar:
      policy.Optional("switch_period_s", spec.controller.switch_period_s);
      break;
  }
  validate_as(spec.controller, prefix + ".policy_params");
  policy.RejectUnknown();
  run.RejectUnknown();
  return spec;
}

json run_spec_to_json(const RunSpec& run) {
  json algo = json::object();
  switch (run.algorithm) {
    case Algorithm::kVasr:
      algo = {{"b_low_s", run.vasr.b_low_s}, {"b_high_s", run.vasr.b_high_s},
              {"b_max_s", run.vasr.b_max_s}, {"delta0", run.vasr.delta0},
              {"gamma", run.vasr.gamma},     {"mu", run.vasr.mu},
              {"assisted_cap_at_current", run.vasr.assisted_cap_at_current}};
      break;
    case Algorithm::kAggressive:
      algo = {{"b_max_s", run.aggressive.b_max_s}};
      break;
    case Algorithm::kSara:
      algo = {{"i_s", run.sara.i_s},
              {"b_alpha_s", run.sara.b_alpha_s},
              {"b_beta_s", run.sara.b_beta_s},
              {"b_max_s", run.sara.b_max_s},
              {"history_window", run.sara.history_window}};
      break;
  }
  json policy = json::object();
  const ControllerParams& c = run.controller;
  switch (c.policy) {
    case RoutingPolicy::kFixed:
      break;
    case RoutingPolicy::kSpr:
      policy = {{"switch_period_s", c.switch_period_s}, {"steady_multiplier", c.steady_multiplier}};
      break;
    case RoutingPolicy::kSar:
      policy = {{"switch_period_s", c.switch_period_s}};
      break;
    case RoutingPolicy::kSarm:
      policy = {{"switch_period_s", c.switch_period_s},
                {"monitor_threshold_kbps", c.monitor_threshold_kbps},
                {"monitor_interval_s", c.monitor_interval_s}};
      break;
  }
  return {{"name", run.name},
          {"algorithm", std::string(to_string(run.algorithm))},
          {"algorithm_params", algo},
          {"policy", std::string(to_string(c.policy))},
          {"policy_params", policy},
          {"start_version", run.start_version}};
}

bool same_run(const RunSpec& a, const RunSpec& b) {
  return run_spec_to_json(a) == run_spec_to_json(b);
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  FieldReader top(doc, "config");
  ExperimentConfig config;
  config.catalog_path = base_dir / top.Required<std::string>("catalog");
  config.scenario_path = base_dir / top.Required<std::string>("scenario");

  const json& metrics_doc = member_or_null(doc, "metrics");
  top.Allow("metrics");
  FieldReader metrics(metrics_doc, "config.metrics");
  metrics.Optional("low_buffer_s", config.low_buffer_s);
  std::string statistic = "time_weighted";
  metrics.Optional("buffer_statistic", statistic);
  metrics.RejectUnknown();
  if (!(config.low_buffer_s > 0.0)) throw ValidationError("config.metrics.low_buffer_s: must be positive");
  if (statistic == "time_weighted") {
    config.buffer_statistic = BufferStatistic::kTimeWeighted;
  } else if (statistic == "per_segment") {
    config.buffer_statistic = BufferStatistic::kPerSegment;
  } else {
    throw ValidationError("config.metrics.buffer_statistic: expected time_weighted or per_segment");
  }

  const json runs = top.Required<json>("runs");
  if (!runs.is_array() || runs.empty()) throw ValidationError("config.runs: expected a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string prefix = "config.runs[" + std::to_string(i) + "]";
    RunSpec spec = parse_run_spec(runs[i], prefix);
    if (!names.insert(spec.name).second) throw ValidationError(prefix + ".name: duplicate run name");
    config.runs.push_back(std::move(spec));
  }
  top.RejectUnknown();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }
  return parse_experiment_config(doc, path.parent_path());
}

SessionConfig make_session_config(const RunSpec& run, std::shared_ptr<const VideoCatalog> catalog,
                                  std::shared_ptr<const Topology> topology) {
  SessionConfig config;
  config.catalog = std::move(catalog);
  config.topology = std::move(topology);
  config.algorithm = run.algorithm;
  config.vasr = run.vasr;
  config.sara = run.sara;
  config.aggressive = run.aggressive;
  config.controller = run.controller;
  config.start_version = run.start_version;
  return config;
}

std::vector<RunResult> run_matrix(const ExperimentConfig& config,
                                  std::shared_ptr<const VideoCatalog> catalog,
                                  std::shared_ptr<const Topology> topology, unsigned parallel) {
  // Validate every run before any simulation starts.
  std::vector<SessionConfig> sessions;
  for (std::size_t i = 0; i < config.runs.size(); ++i) {
    sessions.push_back(make_session_config(config.runs[i], catalog, topology));
    try {
      sessions.back().Validate();
    } catch (const ValidationError& e) {
      throw ValidationError("config.runs[" + std::to_string(i) + "]." + e.what());
    }
  }

  AdaptationParams metric_params;
  metric_params.b_low_s = config.low_buffer_s;
  std::vector<RunResult> results(sessions.size());
  std::vector<std::exception_ptr> errors(sessions.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sessions.size(); i = next++) {
      try {
        RunResult& r = results[i];
        r.spec = config.runs[i];
        r.log = run_session(sessions[i]);
        if (!r.log.records.empty()) r.report = summarize(r.log, metric_params, config.buffer_statistic);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(parallel, sessions.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

json report_to_json(const RunResult& result) {
  json doc = to_json(result.report);
  doc["run"] = result.spec.name;
  doc["config"] = run_spec_to_json(result.spec);
  doc["segments"] = result.log.records.size();
  doc["startup_delay_s"] = result.log.startup_delay_s;
  doc["wall_end_s"] = result.log.wall_end_s;
  doc["reroute_requests"] = result.log.reroute_requests;
  doc["path_changes"] = result.log.path_changes.size();
  doc["truncated"] = result.log.truncated;
  if (result.log.truncated) doc["truncation_reason"] = result.log.truncation_reason;
  return doc;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& run_dir) {
  std::filesystem::create_directories(run_dir);
  std::ostringstream segments;
  write_segments_csv(result.log, segments);
  write_file(run_dir / "segments.csv", segments.str());
  write_file(run_dir / "report.json", report_to_json(result).dump(2) + "\n");

  std::vector<double> bitrates;
  std::vector<double> rates;
  for (const SegmentRecord& r : result.log.records) {
    bitrates.push_back(r.actual_bitrate_kbps);
    rates.push_back(r.measured_throughput_kbps);
  }
  std::ostringstream bitrate_cdf;
  std::ostringstream rate_cdf;
  if (!bitrates.empty()) {
    write_cdf_csv(cdf(bitrates), bitrate_cdf);
    write_cdf_csv(cdf(rates), rate_cdf);
  } else {
    bitrate_cdf << "value,cum_fraction\n";
    rate_cdf << "value,cum_fraction\n";
  }
  write_file(run_dir / "bitrate_cdf.csv", bitrate_cdf.str());
  write_file(run_dir / "downloadrate_cdf.csv", rate_cdf.str());
}

void write_matrix_summary(std::span<const RunResult> results, std::ostream& out) {
  std::string text = kMatrixSummaryHeader;
  text += '\n';
  for (const RunResult& r : results) {
    const MetricsReport& m = r.report;
    text += r.spec.name + ',' + std::string(to_string(r.spec.algorithm)) + ',' +
            std::string(to_string(r.spec.controller.policy));
    for (double v : {m.avg_bitrate_kbps, m.avg_version_index, m.avg_buffer_s, m.frac_buffer_below_low}) {
      text += ',' + format_number(v);
    }
    text += ',' + std::to_string(m.num_switch_downs) + ',' + std::to_string(m.largest_switch_down_step);
    text += ',' + format_number(m.total_stall_s) + ',' + std::to_string(m.num_stall_events);
    text += r.log.truncated ? ",1\n" : ",0\n";
  }
  out << text;
}

int run_command(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                unsigned parallel, std::ostream& err) {
  ExperimentConfig config;
  std::shared_ptr<const VideoCatalog> catalog;
  std::shared_ptr<const Topology> topology;
  try {
    config = load_experiment_config(config_path);
    catalog = std::make_shared<const VideoCatalog>(load_catalog(config.catalog_path));
    topology = std::make_shared<const Topology>(load_scenario(config.scenario_path));
    for (std::size_t i = 0; i < config.runs.size(); ++i) {
      try {
        make_session_config(config.runs[i], catalog, topology).Validate();
      } catch (const ValidationError& e) {
        throw ValidationError("config.runs[" + std::to_string(i) + "]." + e.what());
      }
    }
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigInvalid;
  }

  try {
    const std::vector<RunResult> results = run_matrix(config, catalog, topology, parallel);
    std::filesystem::create_directories(out_dir);
    bool truncated = false;
    for (const RunResult& r : results) {
      write_run_outputs(r, out_dir / r.spec.name);
      if (r.log.truncated) {
        truncated = true;
        err << "run " << r.spec.name << " truncated: " << r.log.truncation_reason << '\n';
      }
    }
    std::ostringstream summary;
    write_matrix_summary(results, summary);
    write_file(out_dir / "matrix_summary.csv", summary.str());
    return truncated ? kExitRuntimeFailure : kExitOk;
  } catch (const std::exception& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

}  // namespace sdnabr
