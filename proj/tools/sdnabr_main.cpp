// Command-line front end: run experiment matrices, plot runs, regenerate
// the bundled catalog fixture.

#include <exception>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "sdnabr/catalog.hpp"
#include "sdnabr/plot.hpp"
#include "sdnabr/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive VBR streaming over multi-path SDN: session simulator"};
  app.require_subcommand(1);

  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  unsigned parallel = 1;
  auto* run = app.add_subcommand("run", "Run every session listed in an experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--parallel", parallel, "Sessions to simulate concurrently")
      ->check(CLI::PositiveNumber);

  std::filesystem::path run_dir;
  std::filesystem::path plot_out;
  auto* plot = app.add_subcommand("plot", "Render SVG charts from one run directory");
  plot->add_option("run_dir", run_dir, "Directory written by `run`")->required();
  plot->add_option("--out", plot_out, "Directory for the SVG files")->required();

  std::filesystem::path catalog_out;
  std::uint64_t seed = 1;
  double swing = 0.5;
  auto* gen = app.add_subcommand("generate-catalog",
                                 "Write the synthetic reference catalog (12-version ladder)");
  gen->add_option("--out", catalog_out, "Output catalog path")->required();
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--swing", swing, "Per-segment VBR swing in [0, 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sdnabr::kExitConfigInvalid;
  }

  if (*run) return sdnabr::run_command(config_path, out_dir, parallel, std::cerr);

  try {
    if (*plot) {
      for (const auto& file : sdnabr::plot_run(run_dir, plot_out)) std::cout << file.string() << '\n';
      return sdnabr::kExitOk;
    }
    if (*gen) {
      const auto catalog = sdnabr::generate_synthetic_catalog(
          seed, static_cast<int>(sdnabr::kReferenceLadderKbps.size()), sdnabr::kReferenceSegmentCount,
          sdnabr::kReferenceLadderKbps, swing, sdnabr::kReferenceSegmentDurationS,
          sdnabr::kReferenceLadderQp);
      sdnabr::save_catalog(catalog, catalog_out);
      return sdnabr::kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sdnabr::kExitRuntimeFailure;
  }
  return sdnabr::kExitOk;
}
