#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rgfdgd/problems.hpp"
#include "rgfdgd/rng.hpp"
#include "rgfdgd/weights.hpp"

namespace rgfdgd {

/// alpha_k = a / (k + k0 + 1)^p with p in (0.5, 1], which makes the step
/// sizes non-summable but square-summable.
class StepSchedule {
 public:
  StepSchedule(double a, double p, double k0 = 0.0);

  double operator()(std::int64_t k) const;

  double a() const { return a_; }
  double p() const { return p_; }
  double k0() const { return k0_; }

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;

 private:
  double a_;
  double p_;
  double k0_;
};

/// Decisions x and surpluses y of all agents at iteration k. Row i holds
/// agent i+1.
struct NetworkState {
  std::int64_t k = 0;
  Matrix x;
  Matrix y;

  int agents() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// Iterates with any coordinate beyond this magnitude count as diverged.
inline constexpr double kDivergenceThreshold = 1e12;

/// One synchronous round:
///   x_i <- sum_j [W_r]_ij x_j + eps y_i - alpha g_i(x_i)
///   y_i <- x_i - sum_j [W_r]_ij x_j + sum_j [W_c]_ij y_j - eps y_i
/// where g_i is the two-point oracle of local cost i with one fresh
/// direction from streams[i]. All reads come from `state`.
///
/// When `oracles` is non-null it receives the n x m matrix of oracle
/// outputs. Throws DivergenceError on non-finite or huge coordinates.
NetworkState step(const NetworkState& state, const WeightSet& weights,
                  const ProblemInstance& problem, double mu, double alpha,
                  std::span<RngStream> streams, Matrix* oracles = nullptr);

/// (1/n)(sum_i x_i + sum_i y_i)
Vector theta_bar(const NetworkState& state);

/// sum_i ||x_i - theta_bar||
double consensus_error(const NetworkState& state);

/// f(theta_bar) - f_star; throws if f_star is unknown.
double optimality_error(const NetworkState& state, const ProblemInstance& problem);

/// Asymptotic optimality-gap bound 2 n sqrt(m) mu D.
double optimality_gap_bound(int n, int m, double mu, double d_hat);

/// Distance bound between smoothed and original minimizers,
///   n (m+3)^{3/2} rho L mu / (2 (1 - sqrt(1 - rho chi))),
/// valid for rho in (0, chi / (n^2 L^2)].
double solution_gap_bound(int n, int m, double mu, double big_l, double chi,
                          double rho);

/// Which iterations end up in the trace.
struct Cadence {
  enum class Kind { kAuto, kEvery, kLog };
  Kind kind = Kind::kAuto;
  std::int64_t every = 1;

  bool records(std::int64_t k, std::int64_t total) const;
  friend bool operator==(const Cadence&, const Cadence&) = default;
};

struct InitialStateSpec {
  enum class Kind { kZeros, kBox, kPoints };
  Kind kind = Kind::kZeros;
  double box_lo = 0.0;
  double box_hi = 0.0;
  std::vector<std::vector<double>> points;
  /// Surplus initialization; empty means zeros.
  std::vector<std::vector<double>> y_points;

  friend bool operator==(const InitialStateSpec&, const InitialStateSpec&) = default;
};

/// x_0 per spec (box draws use one stream per agent derived from seed),
/// y_0 = 0 unless y_points is given.
NetworkState initial_state(const InitialStateSpec& spec, int n, int m,
                           std::uint64_t seed);

struct TraceRecord {
  std::int64_t k = 0;
  double alpha = 0.0;
  double consensus_error = 0.0;
  std::optional<double> optimality_error;
  Vector theta_bar;
  Vector agent_deviation;
};

struct RunTrace {
  int n = 0;
  int m = 0;
  bool has_optimality = false;
  std::vector<TraceRecord> records;
};

/// Everything a run needs, already materialized.
struct RunSetup {
  WeightSet weights;
  ProblemInstance problem;
  double mu = 1e-2;
  StepSchedule schedule{1.0, 1.0};
  std::int64_t iterations = 1;
  std::uint64_t seed = 0;
  Cadence cadence;
  InitialStateSpec init;
  /// Assert the network-mass recursion at every step.
  bool check_mass = true;
};

struct RunResult {
  RunTrace trace;
  NetworkState final_state;
  /// Set when the run stopped early.
  std::optional<std::string> error;
  std::optional<std::int64_t> failed_iteration;
  /// Largest relative residual of n theta_{k+1} = n theta_k - alpha sum g.
  double max_mass_residual = 0.0;
};

/// Per-agent oracle streams for a run seed.
std::vector<RngStream> oracle_streams(std::uint64_t seed, int n);

/// Relative residual of the mass recursion for one step.
double mass_residual(const NetworkState& before, const NetworkState& after,
                     double alpha, const Matrix& oracles);

RunResult run(const RunSetup& setup);

void write_trace_csv(std::ostream& os, const RunTrace& trace);
RunTrace read_trace_csv(std::istream& is);

}  // namespace rgfdgd
