#pragma once

#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "rgfdgd/graph.hpp"

namespace rgfdgd {

using Matrix = Eigen::MatrixXd;

/// Row-stochastic mixing matrix for decisions, column-stochastic mixing
/// matrix for surpluses, the surplus gain, and the 2n x 2n augmented matrix
///
///   [ W_r        eps*I       ]
///   [ I - W_r    W_c - eps*I ]
///
/// whose columns all sum to one.
struct WeightSet {
  Matrix w_r;
  Matrix w_c;
  double epsilon = 0.0;
  Matrix w_aug;

  int agents() const { return static_cast<int>(w_r.rows()); }
};

struct SpectralReport {
  /// Modulus of the third-largest-modulus eigenvalue of w_aug at eps = 0.
  double lambda3 = 0.0;
  /// (1 - lambda3)^n / (20 + 8n)^n.
  double epsilon_bar = 0.0;
  /// Envelope fit deviation(k) <= big_gamma_fit * gamma_fit^k over the fit
  /// window, for the w_aug built with the requested epsilon.
  double gamma_fit = 0.0;
  double big_gamma_fit = 0.0;
  /// Coefficient of determination of the log-linear least-squares fit.
  double r_squared = 0.0;
  /// False when the fitted slope is not negative (W^k is not approaching the
  /// averaging limit); gamma_fit is then >= 1.
  bool decays = false;
};

struct DecayPoint {
  int k;
  double deviation;
};

/// [W_r]_ij = 1/|N_in_i| for j in N_in_i, [W_c]_ij = 1/|N_out_j| for
/// i in N_out_j. Throws if g is not strongly connected.
std::pair<Matrix, Matrix> equal_neighbor_weights(const DirectedGraph& g);

/// Throws InvalidArgument unless rows sum to one (within tol) with
/// nonnegative entries.
void check_row_stochastic(const Matrix& m, double tol = 1e-12);
void check_column_stochastic(const Matrix& m, double tol = 1e-12);

Matrix augment(const Matrix& w_r, const Matrix& w_c, double epsilon);

/// Validates the pair and assembles the augmented matrix.
WeightSet make_weight_set(Matrix w_r, Matrix w_c, double epsilon);

/// Equal-neighbor weights on g plus augmentation.
WeightSet make_weight_set(const DirectedGraph& g, double epsilon);

/// [[11^T/n, 11^T/n], [0, 0]], the limit W^k should approach.
Matrix averaging_limit(int n);

/// Eigenvalue moduli of m, sorted descending.
std::vector<double> eigenvalue_moduli(const Matrix& m);

/// epsilon_bar = (1 - lambda3)^n / (20 + 8n)^n.
double epsilon_bar(double lambda3, int n);

/// deviation(k) = ||W^k - averaging_limit||_inf for k = 1..k_max.
std::vector<DecayPoint> geometric_decay_check(const Matrix& w_aug, int k_max);

/// Fills the spectral quantities. lambda3 and epsilon_bar come from the
/// eps = 0 matrix; the decay fit uses w_aug(epsilon) over k = k_fit_begin..k_fit_end.
SpectralReport spectral_report(const Matrix& w_r, const Matrix& w_c,
                               double epsilon, int k_fit_begin = 1,
                               int k_fit_end = 200);

/// Least-squares line through (k, log deviation(k)).
struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LogLinearFit fit_log_linear(const std::vector<DecayPoint>& points);

/// Diagonal entries of W_c - eps*I that are negative (1-based agent ids).
std::vector<int> negative_surplus_diagonal(const WeightSet& w);

/// Row-major CSV with round-trip precision.
void write_matrix_csv(std::ostream& os, const Matrix& m);

}  // namespace rgfdgd
