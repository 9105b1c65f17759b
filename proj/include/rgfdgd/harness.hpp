#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "rgfdgd/config.hpp"

namespace rgfdgd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

struct CommandOptions {
  /// Overrides `[output] dir`.
  std::optional<std::filesystem::path> out_dir;
  /// Overrides `[algorithm] seed`.
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  /// Sweep cells run concurrently on this many threads.
  int jobs = 1;
  std::ostream* log = nullptr;
};

/// Outcome of one materialized run written to a directory.
struct CellOutcome {
  /// "ok", "diverged" or "error".
  std::string status;
  std::string message;
  double final_consensus_error = 0.0;
  std::optional<double> final_optimality_error;
};

/// Runs `config` and writes `<dir>/trace.csv` and `<dir>/summary`.
/// ConfigError propagates; divergence is reported in the outcome.
CellOutcome execute_run(const RunConfig& config, const std::filesystem::path& dir);

int cmd_run(const std::filesystem::path& config_path, const CommandOptions& options);
int cmd_sweep(const std::filesystem::path& sweep_path, const CommandOptions& options);
int cmd_plot(const std::filesystem::path& csv_path, const std::filesystem::path& out_path,
             const CommandOptions& options);

/// SVG rendering. Throws InvalidArgument on malformed or empty input.
std::string render_trace_svg(const RunTrace& trace, const std::string& title);
std::string render_summary_svg(const std::filesystem::path& summary_path);

}  // namespace rgfdgd
