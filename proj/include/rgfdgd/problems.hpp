#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rgfdgd/graph.hpp"
#include "rgfdgd/weights.hpp"
#include "rgfdgd/zeroth_order.hpp"

namespace rgfdgd {

/// A distributed problem: n local costs over R^m whose sum is the global
/// objective. f_star/x_star are filled by a reference minimizer when known.
struct ProblemInstance {
  std::string name;
  int m = 1;
  std::vector<CostFunction> locals;
  std::optional<double> f_star;
  std::optional<Vector> x_star;

  int agents() const { return static_cast<int>(locals.size()); }
  double global_eval(const Vector& x) const;
  /// Sum of local gradients; throws if any local lacks an analytic gradient.
  Vector global_gradient(const Vector& x) const;
};

/// Polynomial test problem with four scalar agents: three sixth-degree
/// non-convex locals and f4 = x^2. Lipschitz hints are sampled on
/// [-30, 30]; f_star/x_star come from a grid + golden-section search on
/// [-50, 50].
ProblemInstance polynomial_example();

/// Lipschitz hints of the polynomial locals are valid on this box only.
inline constexpr double kPolynomialBox = 30.0;

struct AgentSamples {
  Matrix features;  // D x m, one sample per row
  Vector labels;    // entries in {-1, +1}
};

struct LogisticDataset {
  std::vector<AgentSamples> agents;
  std::vector<double> regularization;  // c_i > 0 per agent

  int dim() const;
};

/// Two Gaussian classes offset by +/- `separation`/sqrt(m) along the all-ones
/// direction with unit noise; labels are balanced at random.
LogisticDataset synthetic_logistic_dataset(int agents, int m,
                                           int samples_per_agent,
                                           double regularization,
                                           std::uint64_t seed,
                                           double separation = 1.0);

/// Reads `feature_1,...,feature_m,label` CSV with a header row.
AgentSamples load_agent_csv(const std::filesystem::path& path);

/// Local cost sum_l ln(1 + exp(-b_l a_l^T x)) + c ||x||^2 per agent; the
/// optimum comes from full-gradient descent on the exact global cost.
ProblemInstance logistic_problem(const LogisticDataset& data);

/// F(x) = d ||x||^2 / (1 + ||x||^2), Lipschitz with constant
/// |d| * 9 / (8 sqrt(3)).
CostFunction fractional_mask(double d, int m);

struct MaskDraw {
  Edge edge;
  double coefficient;
};

struct SplitResult {
  ProblemInstance problem;
  std::vector<MaskDraw> masks;
};

/// Each cross edge (i, j) gets a fractional mask with coefficient uniform in
/// [lo, hi]; agent i subtracts the masks it sends and adds the masks it
/// receives. The global cost, f_star and x_star are unchanged.
SplitResult privacy_split(const ProblemInstance& p, const DirectedGraph& g,
                          double lo, double hi, RngStream& stream);

/// Quadratic locals 0.5 x^T A_i x + b_i^T x. The sum of the A_i must be
/// positive definite; individual A_i may be indefinite.
struct QuadraticProblem {
  ProblemInstance problem;
  /// max_i ||A_i||_2, the gradient Lipschitz constant of every local.
  double gradient_lipschitz = 0.0;
  /// Smallest eigenvalue of sum_i A_i.
  double strong_convexity = 0.0;
};
QuadraticProblem quadratic_problem(const std::vector<Matrix>& a,
                                   const std::vector<Vector>& b);

/// Random instance where every other agent's A_i has a negative eigenvalue.
QuadraticProblem synthetic_quadratic_problem(int agents, int m,
                                             std::uint64_t seed);

}  // namespace rgfdgd
