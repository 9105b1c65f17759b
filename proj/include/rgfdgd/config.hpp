#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgfdgd/engine.hpp"
#include "rgfdgd/error.hpp"

namespace rgfdgd {

/// Malformed or invalid run configuration. `field()` names the offending
/// `section.key`.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string field, const std::string& message)
      : InvalidArgument(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GraphSpec {
  enum class Kind { kEdges, kRing };
  Kind kind = Kind::kEdges;
  int n = 4;
  std::vector<Edge> edges;

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct ProblemSpec {
  enum class Kind { kPolynomial, kLogistic, kQuadratic };
  Kind kind = Kind::kPolynomial;
  int dim = 2;
  int samples_per_agent = 20;
  /// One value for every agent, or one per agent.
  std::vector<double> regularization{0.1};
  double separation = 1.0;
  std::uint64_t data_seed = 1;
  /// Directory with agent_<i>.csv files; synthetic data when empty.
  std::string data_dir;
  bool mask = false;
  double mask_lo = 1.0;
  double mask_hi = 10.0;
  std::uint64_t mask_seed = 1;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Declarative description of one run, read from a flat sectioned
/// key = value file.
struct RunConfig {
  GraphSpec graph;
  std::string weight_scheme = "equal_neighbor";
  double epsilon = 0.1;
  ProblemSpec problem;
  double mu = 1e-2;
  StepSchedule schedule{1.0, 0.6, 0.0};
  std::int64_t iterations = 10'000;
  std::uint64_t seed = 1;
  Cadence cadence;
  InitialStateSpec init;
  std::string out_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class SweepAxis { kMu, kAgents, kDim, kEpsilon, kSeed };

struct SweepSpec {
  RunConfig base;
  SweepAxis axis = SweepAxis::kMu;
  std::vector<double> values;
  int seeds_per_point = 1;
};

RunConfig parse_run_config(const std::string& text);
std::string serialize_run_config(const RunConfig& config);

/// A run config plus a [sweep] section with axis, values, seeds_per_point.
SweepSpec parse_sweep_spec(const std::string& text);

std::string axis_name(SweepAxis axis);

/// Base config with the axis set to `value` and the seed advanced by
/// `seed_offset`. Throws ConfigError for values the axis cannot take.
RunConfig sweep_cell(const SweepSpec& sweep, double value, int seed_offset);

DirectedGraph build_graph(const GraphSpec& spec);
ProblemInstance build_problem(const ProblemSpec& spec, const DirectedGraph& g);

/// Materializes graph, weights and problem. Throws ConfigError when the
/// pieces are inconsistent (e.g. graph not strongly connected).
RunSetup materialize(const RunConfig& config);

}  // namespace rgfdgd
