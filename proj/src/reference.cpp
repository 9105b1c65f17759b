#include "rgfdgd/reference.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rgfdgd/error.hpp"

namespace rgfdgd::reference {

MinimizeResult minimize_1d(const std::function<double(double)>& f, double lo,
                           double hi, double tol, int grid_points) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw InvalidArgument(fmt::format("minimize_1d needs a finite interval, got [{}, {}]", lo, hi));
  }
  if (!(tol > 0.0)) throw InvalidArgument("minimize_1d needs tol > 0");
  if (grid_points < 3) throw InvalidArgument("minimize_1d needs at least 3 grid points");

  const double step = (hi - lo) / (grid_points - 1);
  int best_i = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    double v = f(lo + step * i);
    if (v < best_f) {
      best_f = v;
      best_i = i;
    }
  }
  if (best_i == 0 || best_i == grid_points - 1) {
    throw InvalidArgument(fmt::format(
        "minimum found at the interval boundary x = {}; widen the interval",
        lo + step * best_i));
  }

  double best_x = lo + step * best_i;
  double a = best_x - step, b = best_x + step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  auto track = [&](double x, double v) {
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  };
  track(c, fc);
  track(d, fd);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      track(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      track(d, fd);
    }
    // The bracket stops shrinking once it reaches floating-point resolution.
    if (b - a <= 4 * std::numeric_limits<double>::epsilon() * std::abs(best_x)) break;
  }

  MinimizeResult r;
  r.x_star = Vector::Constant(1, best_x);
  r.f_star = f(best_x);
  r.certificate = fmt::format(
      "grid scan of {} points on [{}, {}], golden-section bracket [{}, {}] width {}",
      grid_points, lo, hi, a, b, b - a);
  return r;
}

MinimizeResult minimize_smooth_convex(
    const std::function<double(const Vector&)>& f,
    const std::function<Vector(const Vector&)>& grad, const Vector& x0,
    double tol, int max_iterations) {
  if (!(tol > 0.0)) throw InvalidArgument("minimize_smooth_convex needs tol > 0");
  // Polak-Ribiere+ conjugate gradients. The line search only looks at the
  // directional derivative phi'(t) = grad(x + t d)^T d, which is monotone for
  // convex f and keeps full precision where differences of f values do not.
  Vector x = x0;
  Vector g = grad(x);
  Vector d = -g;
  int it = 0;
  double t_guess = 1.0;
  for (; it < max_iterations && g.norm() > tol; ++it) {
    double slope0 = g.dot(d);
    if (!(slope0 < 0.0)) {
      d = -g;
      slope0 = -g.squaredNorm();
    }
    // Bracket the root of phi' in [lo, hi].
    double lo = 0.0, slope_lo = slope0;
    double hi = t_guess;
    Vector g_hi = grad(x + hi * d);
    double slope_hi = g_hi.dot(d);
    int expansions = 0;
    while (slope_hi < 0.0 && expansions < 200) {
      lo = hi;
      slope_lo = slope_hi;
      hi *= 2.0;
      g_hi = grad(x + hi * d);
      slope_hi = g_hi.dot(d);
      ++expansions;
    }
    if (slope_hi < 0.0) {
      throw Error("minimize_smooth_convex: objective appears unbounded below");
    }
    // Regula falsi (Illinois) until the curvature condition holds.
    double t = hi;
    Vector g_t = g_hi;
    double slope_t = slope_hi;
    int side = 0;
    for (int ls = 0; ls < 100 && std::abs(slope_t) > 0.1 * std::abs(slope0); ++ls) {
      t = (lo * slope_hi - hi * slope_lo) / (slope_hi - slope_lo);
      if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
      g_t = grad(x + t * d);
      slope_t = g_t.dot(d);
      if (slope_t > 0.0) {
        hi = t;
        slope_hi = slope_t;
        if (side == 1) slope_lo *= 0.5;
        side = 1;
      } else {
        lo = t;
        slope_lo = slope_t;
        if (side == -1) slope_hi *= 0.5;
        side = -1;
      }
    }
    x += t * d;
    t_guess = t;
    const double beta = std::max(0.0, g_t.dot(g_t - g) / g.squaredNorm());
    g = std::move(g_t);
    d = -g + beta * d;
    if ((it + 1) % static_cast<int>(std::max<Eigen::Index>(x.size(), 1)) == 0) d = -g;
  }
  if (g.norm() > tol) {
    throw Error(fmt::format(
        "conjugate gradients stopped after {} iterations with ||grad|| = {} > {}",
        it, g.norm(), tol));
  }
  MinimizeResult r;
  r.x_star = x;
  r.f_star = f(x);
  r.certificate = fmt::format(
      "conjugate gradients with derivative line search, {} iterations, ||grad|| = {}", it,
      g.norm());
  return r;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = xm[j] = x[j];
  }
  return g;
}

McVectorEstimate smoothed_value_fd_gradient(const CostFunction& f,
                                            const Vector& x, double mu,
                                            double h, int n_samples,
                                            RngStream& stream) {
  if (!(h > 0.0) || !(mu >= 0.0) || n_samples < 2) {
    throw InvalidArgument("smoothed_value_fd_gradient needs h > 0, mu >= 0, n >= 2");
  }
  const int m = f.dim;
  Vector mean = Vector::Zero(m), m2 = Vector::Zero(m);
  Vector sample(m);
  for (int s = 0; s < n_samples; ++s) {
    const Vector center = x + mu * stream.normal_vector(m);
    Vector xp = center, xm = center;
    for (int j = 0; j < m; ++j) {
      xp[j] = center[j] + h;
      xm[j] = center[j] - h;
      sample[j] = (evaluate_checked(f, xp) - evaluate_checked(f, xm)) / (2.0 * h);
      xp[j] = xm[j] = center[j];
    }
    Vector delta = sample - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta.cwiseProduct(sample - mean);
  }
  const double c = n_samples;
  return {mean, (m2 / (c - 1.0) / c).cwiseSqrt()};
}

PowerLimit matrix_power_limit(const Matrix& w_aug, double tol) {
  if (w_aug.rows() != w_aug.cols() || w_aug.rows() == 0) {
    throw InvalidArgument("matrix_power_limit needs a nonempty square matrix");
  }
  Matrix p = w_aug;
  const bool column_stochastic =
      ((w_aug.colwise().sum().array() - 1.0).abs() < 1e-12).all();
  double k = 1.0;
  for (int s = 0; s < 40; ++s) {
    Matrix next = p * p;
    // Squaring amplifies drift of the unit eigenvalue; column sums are exactly
    // one in exact arithmetic, so pull them back.
    if (column_stochastic) next.array().rowwise() /= next.colwise().sum().array();
    k *= 2.0;
    double diff = (next - p).cwiseAbs().rowwise().sum().maxCoeff();
    p = std::move(next);
    if (diff < tol) {
      // Periodic matrices settle under squaring without converging.
      if ((p * w_aug - p).cwiseAbs().rowwise().sum().maxCoeff() >= std::sqrt(tol)) {
        throw Error("W^k oscillates instead of converging");
      }
      return {p, k};
    }
  }
  throw Error(fmt::format("W^k did not settle within 2^40 powers (tol {})", tol));
}

}  // namespace rgfdgd::reference
