#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rgfdgd/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gradient-free distributed optimization over directed graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  int jobs = 1;
  app.add_option("--out-dir", out_dir, "Output directory, overrides [output] dir");
  app.add_option("--seed", seed, "Run seed, overrides [algorithm] seed");
  app.add_flag("--quiet", quiet, "Only report failures");
  app.add_option("--jobs", jobs, "Sweep cells to run concurrently")->check(CLI::PositiveNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute one run from a config file");
  run->add_option("config", config_path, "Run config")->required();

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Execute a parameter sweep");
  sweep->add_option("config", sweep_path, "Sweep config")->required();

  std::string csv_path, svg_path;
  auto* plot = app.add_subcommand("plot", "Render a trace or sweep summary as SVG");
  plot->add_option("csv", csv_path, "trace.csv or sweep_summary.csv")->required();
  plot->add_option("out", svg_path, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rgfdgd::kExitConfig;
  }

  rgfdgd::CommandOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  options.seed = seed;
  options.quiet = quiet;
  options.jobs = jobs;
  options.log = &std::cerr;

  if (run->parsed()) return rgfdgd::cmd_run(config_path, options);
  if (sweep->parsed()) return rgfdgd::cmd_sweep(sweep_path, options);
  return rgfdgd::cmd_plot(csv_path, svg_path, options);
}
