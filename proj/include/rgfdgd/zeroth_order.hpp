#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "rgfdgd/rng.hpp"

namespace rgfdgd {

using Vector = Eigen::VectorXd;

/// A local objective accessed through function values only.
///
/// `eval` must be a pure function: same input, same output, safe to call
/// from several threads. `gradient` is optional and is only consumed by the
/// reference minimizers and tests, never by the optimization engine.
struct CostFunction {
  int dim = 1;
  std::function<double(const Vector&)> eval;
  /// Lipschitz constant estimate, possibly valid only on a bounded region.
  std::optional<double> lipschitz_hint;
  std::function<Vector(const Vector&)> gradient;
  std::string name;

  double operator()(const Vector& x) const { return eval(x); }
};

/// Evaluates f and throws NonFiniteValue naming the query point if the
/// result is NaN or infinite.
double evaluate_checked(const CostFunction& f, const Vector& x);

/// Wraps f so every evaluation increments a shared counter.
struct CountingCost {
  CostFunction function;
  std::shared_ptr<std::atomic<std::int64_t>> count;
};
CountingCost count_evaluations(const CostFunction& f);

/// Standard normal direction plus where it came from.
struct GaussianDirection {
  Vector zeta;
  std::uint64_t stream_id = 0;
  /// Index of the first scalar draw used for this vector.
  std::uint64_t draw_index = 0;
};

GaussianDirection sample_direction(int m, RngStream& stream);

/// Two-point oracle ((f(x + mu*zeta) - f(x)) / mu) * zeta. Exactly two
/// evaluations of f. Requires mu > 0.
Vector gf_oracle(const CostFunction& f, const Vector& x, double mu,
                 const GaussianDirection& zeta);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct McVectorEstimate {
  Vector value;
  Vector std_error;
};

/// Monte-Carlo estimate of the Gaussian-smoothed value E[f(x + mu*zeta)].
/// mu = 0 returns (f(x), 0) without touching the stream.
McEstimate smoothed_value_mc(const CostFunction& f, const Vector& x, double mu,
                             int n_samples, RngStream& stream);

/// Coordinate-wise mean and standard error of n_samples oracle draws, which
/// estimates the gradient of the smoothed function.
McVectorEstimate smoothed_grad_mc(const CostFunction& f, const Vector& x,
                                  double mu, int n_samples, RngStream& stream);

struct SecondMomentCheck {
  double mean_sq_norm = 0.0;
  /// ((m + 4) * lipschitz_hint)^2
  double bound = 0.0;
};

/// Sample mean of ||g||^2 next to the bound ((m+4) D)^2. Throws when f has
/// no Lipschitz hint.
SecondMomentCheck oracle_second_moment_check(const CostFunction& f,
                                             const Vector& x, double mu,
                                             int n_samples, RngStream& stream);

/// Largest sampled gradient norm of f on the box [lo, hi]^m, using central
/// differences. One-dimensional functions are scanned on a uniform grid of
/// `samples` points; higher dimensions use `samples` uniform random points.
double estimate_lipschitz_on_box(const CostFunction& f, double lo, double hi,
                                 int samples, std::uint64_t seed = 0);

}  // namespace rgfdgd
