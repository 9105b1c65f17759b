#pragma once

#include <functional>
#include <string>

#include "rgfdgd/weights.hpp"
#include "rgfdgd/zeroth_order.hpp"

// Brute-force baselines that supply ground truth and cross-check the
// engine. None of them share code paths with the optimizer.
namespace rgfdgd::reference {

struct MinimizeResult {
  Vector x_star;
  double f_star = 0.0;
  std::string certificate;
};

/// Global minimum of a scalar function on [lo, hi]: uniform grid scan with
/// `grid_points` points, then golden-section refinement of the best bracket
/// down to width `tol`. Throws when the minimizer sits on the interval
/// boundary.
MinimizeResult minimize_1d(const std::function<double(double)>& f, double lo,
                           double hi, double tol = 1e-10,
                           int grid_points = 20001);

/// Nonlinear conjugate gradients for smooth convex f until ||grad|| <= tol.
/// Throws if the tolerance is not reached within max_iterations.
MinimizeResult minimize_smooth_convex(
    const std::function<double(const Vector&)>& f,
    const std::function<Vector(const Vector&)>& grad, const Vector& x0,
    double tol = 1e-8, int max_iterations = 100'000);

/// Central differences (f(x + h e_j) - f(x - h e_j)) / (2h).
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& x, double h);

/// Central difference of the Monte-Carlo smoothed value, using the same
/// Gaussian directions at x + h e_j and x - h e_j so the difference quotient
/// has a usable standard error.
McVectorEstimate smoothed_value_fd_gradient(const CostFunction& f,
                                            const Vector& x, double mu,
                                            double h, int n_samples,
                                            RngStream& stream);

struct PowerLimit {
  Matrix limit;
  /// Power of w_aug that `limit` equals (a power of two).
  double k_reached = 0.0;
};

/// Repeated squaring until successive powers differ by less than tol in the
/// infinity norm. Throws if 40 squarings are not enough.
PowerLimit matrix_power_limit(const Matrix& w_aug, double tol = 1e-12);

}  // namespace rgfdgd::reference
