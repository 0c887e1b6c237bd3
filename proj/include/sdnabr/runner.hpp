#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdnabr/engine.hpp"
#include "sdnabr/metrics.hpp"

namespace sdnabr {

// One named session of an experiment matrix.
struct RunSpec {
  std::string name;
  Algorithm algorithm = Algorithm::kVasr;
  AdaptationParams vasr;
  SaraParams sara;
  AggressiveParams aggressive;
  ControllerParams controller;
  int start_version = 0;
};

struct ExperimentConfig {
  std::filesystem::path catalog_path;
  std::filesystem::path scenario_path;
  std::vector<RunSpec> runs;
  double low_buffer_s = 15.0;
  BufferStatistic buffer_statistic = BufferStatistic::kTimeWeighted;
};

// Paths inside the document resolve against base_dir. Throws
// ValidationError whose message starts with the offending field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

RunSpec parse_run_spec(const nlohmann::json& doc, const std::string& field_prefix = "run");
// Canonical echo of a run; parse_run_spec(run_spec_to_json(r)) == r.
nlohmann::json run_spec_to_json(const RunSpec& run);
bool same_run(const RunSpec& a, const RunSpec& b);

SessionConfig make_session_config(const RunSpec& run, std::shared_ptr<const VideoCatalog> catalog,
                                  std::shared_ptr<const Topology> topology);

struct RunResult {
  RunSpec spec;
  SessionLog log;
  MetricsReport report;
};

// Runs every session, up to `parallel` at a time. Results keep config order.
std::vector<RunResult> run_matrix(const ExperimentConfig& config,
                                  std::shared_ptr<const VideoCatalog> catalog,
                                  std::shared_ptr<const Topology> topology, unsigned parallel);

nlohmann::json report_to_json(const RunResult& result);

// segments.csv, report.json, bitrate_cdf.csv, downloadrate_cdf.csv.
void write_run_outputs(const RunResult& result, const std::filesystem::path& run_dir);

inline constexpr const char* kMatrixSummaryHeader =
    "run,algorithm,policy,avg_bitrate_kbps,avg_version_index,avg_buffer_s,"
    "frac_buffer_below_low,num_switch_downs,largest_switch_down_step,total_stall_s,"
    "num_stall_events,truncated";

void write_matrix_summary(std::span<const RunResult> results, std::ostream& out);

// Exit codes of the `run` command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeFailure = 1;
inline constexpr int kExitConfigInvalid = 2;

// Loads, runs and writes a whole experiment matrix. Diagnostics go to err.
int run_command(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                unsigned parallel, std::ostream& err);

}  // namespace sdnabr
