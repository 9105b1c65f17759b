#include "rgfdgd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "rgfdgd/reference.hpp"

namespace rgfdgd {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
}

std::ostream& log_stream(const CommandOptions& o) { return o.log ? *o.log : std::cerr; }

std::optional<double> max_lipschitz_hint(const ProblemInstance& p) {
  double d = 0.0;
  for (const auto& f : p.locals) {
    if (!f.lipschitz_hint) return std::nullopt;
    d = std::max(d, *f.lipschitz_hint);
  }
  return d;
}

std::string optional_number(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : "nan";
}

void apply_overrides(RunConfig& c, const CommandOptions& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.out_dir) c.out_dir = o.out_dir->string();
}

}  // namespace

CellOutcome execute_run(const RunConfig& config, const fs::path& dir) {
  const auto started = std::chrono::steady_clock::now();
  RunSetup setup = materialize(config);
  const int n = setup.weights.agents();
  const int m = setup.problem.m;

  const SpectralReport spectral =
      spectral_report(setup.weights.w_r, setup.weights.w_c, setup.weights.epsilon);
  std::string limit_status;
  double limit_deviation = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto limit = reference::matrix_power_limit(setup.weights.w_aug);
    limit_deviation = (limit.limit - averaging_limit(n)).cwiseAbs().maxCoeff();
    limit_status = fmt::format("{}", limit.k_reached);
  } catch (const Error& e) {
    limit_status = "not_reached";
  }

  RunResult result = run(setup);
  std::ostringstream trace;
  write_trace_csv(trace, result.trace);
  write_file(dir / "trace.csv", trace.str());

  CellOutcome out;
  out.status = result.error ? "diverged" : "ok";
  if (result.error) out.message = *result.error;
  if (!result.trace.records.empty()) {
    out.final_consensus_error = result.trace.records.back().consensus_error;
    out.final_optimality_error = result.trace.records.back().optimality_error;
  }

  const auto d_hat = max_lipschitz_hint(setup.problem);
  const auto neg = negative_surplus_diagonal(setup.weights);
  std::string neg_list;
  for (std::size_t i = 0; i < neg.size(); ++i) neg_list += (i ? ";" : "") + std::to_string(neg[i]);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
  kv("status", out.status);
  if (result.error) {
    kv("failed_iteration", std::to_string(result.failed_iteration.value_or(-1)));
    kv("error", out.message);
  }
  kv("problem", setup.problem.name);
  kv("agents", std::to_string(n));
  kv("dim", std::to_string(m));
  kv("iterations", std::to_string(config.iterations));
  kv("final_k", std::to_string(result.final_state.k));
  kv("final_consensus_error", fmt::format("{}", out.final_consensus_error));
  kv("final_optimality_error", optional_number(out.final_optimality_error));
  kv("f_star", optional_number(setup.problem.f_star));
  kv("lipschitz_hint_max", optional_number(d_hat));
  kv("optimality_gap_bound",
     d_hat ? fmt::format("{}", optimality_gap_bound(n, m, config.mu, *d_hat)) : "nan");
  kv("epsilon", fmt::format("{}", config.epsilon));
  kv("epsilon_bar", fmt::format("{}", spectral.epsilon_bar));
  kv("epsilon_bar_log10", fmt::format("{}", n * (std::log10(1.0 - spectral.lambda3) - std::log10(20.0 + 8.0 * n))));
  kv("epsilon_below_bar", config.epsilon < spectral.epsilon_bar ? "true" : "false");
  kv("lambda3", fmt::format("{}", spectral.lambda3));
  kv("decay_gamma_fit", fmt::format("{}", spectral.gamma_fit));
  kv("decay_big_gamma_fit", fmt::format("{}", spectral.big_gamma_fit));
  kv("decay_r_squared", fmt::format("{}", spectral.r_squared));
  kv("power_limit_squarings", limit_status);
  kv("power_limit_deviation", fmt::format("{}", limit_deviation));
  kv("negative_surplus_diagonal", neg_list.empty() ? "none" : neg_list);
  kv("max_mass_residual", fmt::format("{}", result.max_mass_residual));
  kv("wall_time_seconds", fmt::format("{:.3f}", wall));
  write_file(dir / "summary", s);
  return out;
}

int cmd_run(const fs::path& config_path, const CommandOptions& options) {
  std::ostream& log = log_stream(options);
  try {
    RunConfig config = parse_run_config(read_file(config_path));
    apply_overrides(config, options);
    const fs::path dir = config.out_dir.empty() ? fs::path("out") : fs::path(config.out_dir);
    CellOutcome out = execute_run(config, dir);
    if (out.status != "ok") {
      log << "diverged: " << out.message << "\n";
      log << "partial trace written to " << (dir / "trace.csv").string() << "\n";
      return kExitDiverged;
    }
    if (!options.quiet) {
      log << fmt::format("final consensus_error {}  optimality_error {}\n",
                         out.final_consensus_error, optional_number(out.final_optimality_error));
      log << "wrote " << (dir / "trace.csv").string() << " and "
          << (dir / "summary").string() << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_sweep(const fs::path& sweep_path, const CommandOptions& options) {
  std::ostream& log = log_stream(options);
  SweepSpec sweep;
  try {
    sweep = parse_sweep_spec(read_file(sweep_path));
    apply_overrides(sweep.base, options);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const fs::path root =
      sweep.base.out_dir.empty() ? fs::path("out") : fs::path(sweep.base.out_dir);
  const std::string axis = axis_name(sweep.axis);

  struct Cell {
    double value;
    int offset;
    std::uint64_t seed = 0;
    fs::path rel;
    CellOutcome outcome;
  };
  std::vector<Cell> cells;
  for (double v : sweep.values) {
    for (int s = 0; s < sweep.seeds_per_point; ++s) cells.push_back(Cell{v, s, 0, {}, {}});
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      try {
        RunConfig c = sweep_cell(sweep, cell.value, cell.offset);
        cell.seed = c.seed;
        cell.rel = fs::path(fmt::format("{}={}", axis, cell.value)) /
                   fmt::format("seed_{}", c.seed);
        cell.outcome = execute_run(c, root / cell.rel);
      } catch (const std::exception& e) {
        cell.outcome.status = "error";
        cell.outcome.message = e.what();
      }
      if (!options.quiet || cell.outcome.status != "ok") {
        std::lock_guard lock(log_mutex);
        log << fmt::format("{}={} seed {}: {}{}\n", axis, cell.value, cell.seed,
                           cell.outcome.status,
                           cell.outcome.message.empty() ? "" : " (" + cell.outcome.message + ")");
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv =
      "axis,value,seed,status,final_consensus_error,final_optimality_error,trace\n";
  bool failed = false;
  for (const Cell& cell : cells) {
    const bool ok = cell.outcome.status == "ok";
    failed = failed || !ok;
    csv += fmt::format("{},{},{},{},{},{},{}\n", axis, cell.value, cell.seed, cell.outcome.status,
                       ok ? fmt::format("{}", cell.outcome.final_consensus_error) : "nan",
                       ok ? optional_number(cell.outcome.final_optimality_error) : "nan",
                       cell.rel.empty() ? "" : (cell.rel / "trace.csv").generic_string());
  }
  try {
    write_file(root / "sweep_summary.csv", csv);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  if (!options.quiet) log << "wrote " << (root / "sweep_summary.csv").string() << "\n";
  return failed ? kExitFailure : kExitOk;
}

int cmd_plot(const fs::path& csv_path, const fs::path& out_path, const CommandOptions& options) {
  std::ostream& log = log_stream(options);
  std::string svg;
  try {
    std::ifstream in(csv_path);
    if (!in) {
      log << "cannot read " << csv_path.string() << "\n";
      return kExitConfig;
    }
    std::string header;
    std::getline(in, header);
    if (header.rfind("axis,", 0) == 0) {
      svg = render_summary_svg(csv_path);
    } else {
      in.clear();
      in.seekg(0);
      svg = render_trace_svg(read_trace_csv(in), csv_path.filename().string());
    }
  } catch (const std::exception& e) {
    log << "malformed input: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::binary);
    out << svg;
    if (!out) throw Error("write failed");
  } catch (const std::exception& e) {
    log << "cannot write " << out_path.string() << ": " << e.what() << "\n";
    return kExitFailure;
  }
  if (!options.quiet) log << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace rgfdgd
