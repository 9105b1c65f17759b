#include "rgfdgd/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rgfdgd/error.hpp"

namespace rgfdgd {

std::pair<Matrix, Matrix> equal_neighbor_weights(const DirectedGraph& g) {
  if (!g.is_strongly_connected()) {
    throw InvalidArgument("communication graph is not strongly connected");
  }
  const int n = g.size();
  Matrix w_r = Matrix::Zero(n, n);
  Matrix w_c = Matrix::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    const auto& in = g.in_neighbors(i);
    for (int j : in) w_r(i - 1, j - 1) = 1.0 / static_cast<double>(in.size());
    const auto& out = g.out_neighbors(i);
    // Column i of W_c spreads agent i's surplus over its out-neighbors.
    for (int j : out) w_c(j - 1, i - 1) = 1.0 / static_cast<double>(out.size());
  }
  return {w_r, w_c};
}

void check_row_stochastic(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("row-stochastic matrix must be square and nonempty");
  }
  if ((m.array() < 0.0).any()) {
    throw InvalidArgument("row-stochastic matrix has a negative entry");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double s = m.row(i).sum();
    if (std::abs(s - 1.0) > tol) {
      throw InvalidArgument(fmt::format("row {} of W_r sums to {}", i + 1, s));
    }
  }
}

void check_column_stochastic(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("column-stochastic matrix must be square and nonempty");
  }
  if ((m.array() < 0.0).any()) {
    throw InvalidArgument("column-stochastic matrix has a negative entry");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = m.col(j).sum();
    if (std::abs(s - 1.0) > tol) {
      throw InvalidArgument(fmt::format("column {} of W_c sums to {}", j + 1, s));
    }
  }
}

Matrix augment(const Matrix& w_r, const Matrix& w_c, double epsilon) {
  if (w_r.rows() != w_r.cols() || w_c.rows() != w_c.cols() ||
      w_r.rows() != w_c.rows()) {
    throw InvalidArgument(fmt::format(
        "W_r is {}x{} but W_c is {}x{}; both must be the same square size",
        w_r.rows(), w_r.cols(), w_c.rows(), w_c.cols()));
  }
  if (!(epsilon >= 0.0)) {
    throw InvalidArgument(fmt::format("epsilon must be nonnegative, got {}", epsilon));
  }
  const Eigen::Index n = w_r.rows();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix w(2 * n, 2 * n);
  w.topLeftCorner(n, n) = w_r;
  w.topRightCorner(n, n) = epsilon * eye;
  w.bottomLeftCorner(n, n) = eye - w_r;
  w.bottomRightCorner(n, n) = w_c - epsilon * eye;
  return w;
}

WeightSet make_weight_set(Matrix w_r, Matrix w_c, double epsilon) {
  check_row_stochastic(w_r);
  check_column_stochastic(w_c);
  WeightSet w;
  w.w_aug = augment(w_r, w_c, epsilon);
  w.w_r = std::move(w_r);
  w.w_c = std::move(w_c);
  w.epsilon = epsilon;
  return w;
}

WeightSet make_weight_set(const DirectedGraph& g, double epsilon) {
  auto [w_r, w_c] = equal_neighbor_weights(g);
  return make_weight_set(std::move(w_r), std::move(w_c), epsilon);
}

Matrix averaging_limit(int n) {
  Matrix lim = Matrix::Zero(2 * n, 2 * n);
  lim.topRows(n).setConstant(1.0 / n);
  return lim;
}

std::vector<double> eigenvalue_moduli(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error("eigenvalue computation did not converge");
  }
  std::vector<double> mod;
  mod.reserve(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    mod.push_back(std::abs(solver.eigenvalues()[i]));
  }
  std::sort(mod.begin(), mod.end(), std::greater<>());
  return mod;
}

double epsilon_bar(double lambda3, int n) {
  return std::pow(1.0 - lambda3, n) / std::pow(20.0 + 8.0 * n, n);
}

std::vector<DecayPoint> geometric_decay_check(const Matrix& w_aug, int k_max) {
  const int n = static_cast<int>(w_aug.rows() / 2);
  const Matrix limit = averaging_limit(n);
  std::vector<DecayPoint> out;
  out.reserve(std::max(k_max, 0));
  Matrix power = w_aug;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) power = power * w_aug;
    double dev = (power - limit).cwiseAbs().rowwise().sum().maxCoeff();
    out.push_back({k, dev});
  }
  return out;
}

LogLinearFit fit_log_linear(const std::vector<DecayPoint>& points) {
  LogLinearFit fit;
  const double count = static_cast<double>(points.size());
  if (points.size() < 2) return fit;
  double sk = 0, sy = 0;
  for (const auto& p : points) {
    sk += p.k;
    sy += std::log(p.deviation);
  }
  const double mk = sk / count, my = sy / count;
  double skk = 0, sky = 0, syy = 0;
  for (const auto& p : points) {
    double dk = p.k - mk, dy = std::log(p.deviation) - my;
    skk += dk * dk;
    sky += dk * dy;
    syy += dy * dy;
  }
  fit.slope = sky / skk;
  fit.intercept = my - fit.slope * mk;
  double sse = 0;
  for (const auto& p : points) {
    double r = std::log(p.deviation) - (fit.intercept + fit.slope * p.k);
    sse += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

SpectralReport spectral_report(const Matrix& w_r, const Matrix& w_c,
                               double epsilon, int k_fit_begin, int k_fit_end) {
  check_row_stochastic(w_r);
  check_column_stochastic(w_c);
  if (k_fit_begin < 1 || k_fit_end <= k_fit_begin) {
    throw InvalidArgument("decay fit window must satisfy 1 <= begin < end");
  }
  const int n = static_cast<int>(w_r.rows());
  SpectralReport rep;
  auto mod = eigenvalue_moduli(augment(w_r, w_c, 0.0));
  rep.lambda3 = mod.size() >= 3 ? mod[2] : 0.0;
  rep.epsilon_bar = epsilon_bar(rep.lambda3, n);

  auto decay = geometric_decay_check(augment(w_r, w_c, epsilon), k_fit_end);
  std::vector<DecayPoint> window;
  for (const auto& p : decay) {
    // Exact zeros carry no slope information (e.g. W reaches its limit).
    if (p.k >= k_fit_begin && p.deviation > 0.0) window.push_back(p);
  }
  if (window.size() < 2) {
    rep.gamma_fit = 0.0;
    rep.big_gamma_fit = decay.empty() ? 0.0 : decay.front().deviation;
    rep.r_squared = 1.0;
    rep.decays = true;
    return rep;
  }
  LogLinearFit fit = fit_log_linear(window);
  rep.gamma_fit = std::exp(fit.slope);
  rep.r_squared = fit.r_squared;
  rep.decays = fit.slope < 0.0;
  // Lift the intercept so the line upper-bounds every point in the window.
  double lift = -std::numeric_limits<double>::infinity();
  for (const auto& p : window) {
    lift = std::max(lift, std::log(p.deviation) - fit.slope * p.k);
  }
  rep.big_gamma_fit = std::exp(lift);
  return rep;
}

std::vector<int> negative_surplus_diagonal(const WeightSet& w) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < w.w_c.rows(); ++i) {
    if (w.w_c(i, i) - w.epsilon < 0.0) out.push_back(static_cast<int>(i) + 1);
  }
  return out;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << fmt::format("{}", m(i, j));
    }
    os << '\n';
  }
}

}  // namespace rgfdgd
