#include "rgfdgd/problems.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "rgfdgd/error.hpp"
#include "rgfdgd/reference.hpp"

namespace rgfdgd {
namespace {

// Coefficients of x^0 .. x^6.
using Poly6 = std::array<double, 7>;

double poly_value(const Poly6& c, double x) {
  double v = 0.0;
  for (int p = 6; p >= 0; --p) v = v * x + c[p];
  return v;
}

double poly_derivative(const Poly6& c, double x) {
  double v = 0.0;
  for (int p = 6; p >= 1; --p) v = v * x + p * c[p];
  return v;
}

CostFunction scalar_polynomial(std::string name, const Poly6& c) {
  CostFunction f;
  f.dim = 1;
  f.name = std::move(name);
  f.eval = [c](const Vector& x) { return poly_value(c, x[0]); };
  f.gradient = [c](const Vector& x) {
    return Vector::Constant(1, poly_derivative(c, x[0]));
  };
  return f;
}

// ln(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(z))
double sigmoid_neg(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

double ProblemInstance::global_eval(const Vector& x) const {
  double s = 0.0;
  for (const auto& f : locals) s += f.eval(x);
  return s;
}

Vector ProblemInstance::global_gradient(const Vector& x) const {
  Vector g = Vector::Zero(m);
  for (const auto& f : locals) {
    if (!f.gradient) {
      throw InvalidArgument(fmt::format("local cost {} has no analytic gradient", f.name));
    }
    g += f.gradient(x);
  }
  return g;
}

ProblemInstance polynomial_example() {
  ProblemInstance p;
  p.name = "polynomial";
  p.m = 1;
  // x^0, x^1, ..., x^6
  p.locals.push_back(scalar_polynomial("f1", {0, 0.8, 5e-3, 5e-4, -5e-5, -1e-6, 3e-8}));
  p.locals.push_back(scalar_polynomial("f2", {0, 0.8, 5e-3, -5e-4, -5e-5, 1e-6, 3e-8}));
  p.locals.push_back(scalar_polynomial("f3", {0, 0.8, 5e-3, -5e-3, -5e-5, -1e-6, 3e-8}));
  p.locals.push_back(scalar_polynomial("f4", {0, 0, 1, 0, 0, 0, 0}));
  for (auto& f : p.locals) {
    f.lipschitz_hint =
        estimate_lipschitz_on_box(f, -kPolynomialBox, kPolynomialBox, 60001);
  }
  auto r = reference::minimize_1d(
      [&p](double x) { return p.global_eval(Vector::Constant(1, x)); }, -50.0, 50.0,
      1e-10);
  p.f_star = r.f_star;
  p.x_star = r.x_star;
  return p;
}

int LogisticDataset::dim() const {
  return agents.empty() ? 0 : static_cast<int>(agents.front().features.cols());
}

LogisticDataset synthetic_logistic_dataset(int agents, int m,
                                           int samples_per_agent,
                                           double regularization,
                                           std::uint64_t seed,
                                           double separation) {
  if (agents < 1 || m < 1 || samples_per_agent < 1) {
    throw InvalidArgument("synthetic dataset needs positive agents, dim and samples");
  }
  if (!(regularization > 0.0)) {
    throw InvalidArgument("regularization must be positive");
  }
  LogisticDataset data;
  const double shift = separation / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < agents; ++i) {
    RngStream rng(seed, StreamPurpose::kDataset, static_cast<std::uint64_t>(i));
    AgentSamples s;
    s.features.resize(samples_per_agent, m);
    s.labels.resize(samples_per_agent);
    for (int l = 0; l < samples_per_agent; ++l) {
      const double b = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      s.labels[l] = b;
      for (int j = 0; j < m; ++j) s.features(l, j) = b * shift + rng.normal();
    }
    data.agents.push_back(std::move(s));
    data.regularization.push_back(regularization);
  }
  return data;
}

AgentSamples load_agent_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidArgument(fmt::format("{} is empty", path.string()));
  }
  int cols = 1;
  for (char ch : line) cols += ch == ',';
  if (cols < 2) {
    throw InvalidArgument(fmt::format("{} needs at least one feature column", path.string()));
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument(fmt::format("{}:{}: '{}' is not a number",
                                          path.string(), lineno, cell));
      }
    }
    if (static_cast<int>(row.size()) != cols) {
      throw InvalidArgument(fmt::format("{}:{}: expected {} columns, found {}",
                                        path.string(), lineno, cols, row.size()));
    }
    if (row.back() != 1.0 && row.back() != -1.0) {
      throw InvalidArgument(fmt::format("{}:{}: label must be -1 or +1",
                                        path.string(), lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InvalidArgument(fmt::format("{} has no samples", path.string()));
  }
  AgentSamples s;
  s.features.resize(static_cast<Eigen::Index>(rows.size()), cols - 1);
  s.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t l = 0; l < rows.size(); ++l) {
    for (int j = 0; j + 1 < cols; ++j) s.features(l, j) = rows[l][j];
    s.labels[l] = rows[l].back();
  }
  return s;
}

ProblemInstance logistic_problem(const LogisticDataset& data) {
  if (data.agents.empty()) throw InvalidArgument("logistic problem needs at least one agent");
  if (data.regularization.size() != data.agents.size()) {
    throw InvalidArgument("need one regularization constant per agent");
  }
  const int m = data.dim();
  ProblemInstance p;
  p.name = "logistic";
  p.m = m;
  for (std::size_t i = 0; i < data.agents.size(); ++i) {
    const auto& s = data.agents[i];
    if (s.features.rows() == 0) {
      throw InvalidArgument(fmt::format("agent {} has no samples", i + 1));
    }
    if (s.features.cols() != m) {
      throw InvalidArgument(fmt::format(
          "agent {} samples have dimension {}, expected {}", i + 1, s.features.cols(), m));
    }
    for (Eigen::Index l = 0; l < s.labels.size(); ++l) {
      if (s.labels[l] != 1.0 && s.labels[l] != -1.0) {
        throw InvalidArgument(fmt::format("agent {} has a label outside {{-1, +1}}", i + 1));
      }
    }
    const double c = data.regularization[i];
    if (!(c > 0.0)) throw InvalidArgument("regularization must be positive");
    // Rows pre-multiplied by their label: z_l = b_l a_l^T x.
    auto signed_features = std::make_shared<const Matrix>(
        s.labels.asDiagonal() * s.features);
    CostFunction f;
    f.dim = m;
    f.name = fmt::format("logistic_{}", i + 1);
    f.eval = [signed_features, c](const Vector& x) {
      Vector z = *signed_features * x;
      double v = 0.0;
      for (Eigen::Index l = 0; l < z.size(); ++l) v += softplus_neg(z[l]);
      return v + c * x.squaredNorm();
    };
    f.gradient = [signed_features, c](const Vector& x) {
      Vector z = *signed_features * x;
      Vector w(z.size());
      for (Eigen::Index l = 0; l < z.size(); ++l) w[l] = -sigmoid_neg(z[l]);
      return Vector(signed_features->transpose() * w + 2.0 * c * x);
    };
    p.locals.push_back(std::move(f));
  }
  auto r = reference::minimize_smooth_convex(
      [&p](const Vector& x) { return p.global_eval(x); },
      [&p](const Vector& x) { return p.global_gradient(x); }, Vector::Zero(m), 1e-8);
  p.f_star = r.f_star;
  p.x_star = r.x_star;
  return p;
}

CostFunction fractional_mask(double d, int m) {
  CostFunction f;
  f.dim = m;
  f.name = fmt::format("mask({})", d);
  f.eval = [d](const Vector& x) {
    const double r2 = x.squaredNorm();
    return d * r2 / (1.0 + r2);
  };
  f.gradient = [d](const Vector& x) {
    const double r2 = x.squaredNorm();
    return Vector((2.0 * d / ((1.0 + r2) * (1.0 + r2))) * x);
  };
  // max_r 2 r / (1 + r^2)^2 is attained at r = 1/sqrt(3).
  f.lipschitz_hint = std::abs(d) * 9.0 / (8.0 * std::sqrt(3.0));
  return f;
}

SplitResult privacy_split(const ProblemInstance& p, const DirectedGraph& g,
                          double lo, double hi, RngStream& stream) {
  if (p.agents() != g.size()) {
    throw InvalidArgument(fmt::format("problem has {} agents but graph has {}",
                                      p.agents(), g.size()));
  }
  if (!(hi >= lo)) throw InvalidArgument("mask coefficient range must satisfy lo <= hi");
  SplitResult out;
  for (const Edge& e : g.cross_edges()) {
    out.masks.push_back({e, lo == hi ? lo : stream.uniform(lo, hi)});
  }

  // Signed coefficient per agent: -d for each mask it sends, +d for each it
  // receives.
  std::vector<std::vector<double>> signed_coeffs(p.agents());
  for (const auto& mask : out.masks) {
    signed_coeffs[mask.edge.from - 1].push_back(-mask.coefficient);
    signed_coeffs[mask.edge.to - 1].push_back(mask.coefficient);
  }

  out.problem = p;
  out.problem.name = p.name + "+masked";
  for (int i = 0; i < p.agents(); ++i) {
    const CostFunction& base = p.locals[i];
    const auto& coeffs = signed_coeffs[i];
    if (coeffs.empty()) continue;
    CostFunction f = base;
    f.name = base.name + "+masks";
    f.eval = [inner = base.eval, coeffs](const Vector& x) {
      const double r2 = x.squaredNorm();
      const double frac = r2 / (1.0 + r2);
      double v = inner(x);
      for (double d : coeffs) v += d * frac;
      return v;
    };
    if (base.gradient) {
      f.gradient = [inner = base.gradient, coeffs](const Vector& x) {
        const double r2 = x.squaredNorm();
        double total = 0.0;
        for (double d : coeffs) total += d;
        return Vector(inner(x) + (2.0 * total / ((1.0 + r2) * (1.0 + r2))) * x);
      };
    }
    if (base.lipschitz_hint) {
      double extra = 0.0;
      for (double d : coeffs) extra += std::abs(d);
      f.lipschitz_hint = *base.lipschitz_hint + extra * 9.0 / (8.0 * std::sqrt(3.0));
    }
    out.problem.locals[i] = std::move(f);
  }
  return out;
}

QuadraticProblem quadratic_problem(const std::vector<Matrix>& a,
                                   const std::vector<Vector>& b) {
  if (a.empty() || a.size() != b.size()) {
    throw InvalidArgument("quadratic problem needs matching, nonempty A and b lists");
  }
  const Eigen::Index m = a.front().rows();
  QuadraticProblem q;
  q.problem.name = "quadratic";
  q.problem.m = static_cast<int>(m);
  Matrix a_sum = Matrix::Zero(m, m);
  Vector b_sum = Vector::Zero(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != m || a[i].cols() != m || b[i].size() != m) {
      throw InvalidArgument(fmt::format("quadratic term {} has the wrong shape", i + 1));
    }
    if (!a[i].isApprox(a[i].transpose())) {
      throw InvalidArgument(fmt::format("A_{} is not symmetric", i + 1));
    }
    auto am = std::make_shared<const Matrix>(a[i]);
    auto bv = std::make_shared<const Vector>(b[i]);
    CostFunction f;
    f.dim = static_cast<int>(m);
    f.name = fmt::format("quadratic_{}", i + 1);
    f.eval = [am, bv](const Vector& x) { return 0.5 * x.dot(*am * x) + bv->dot(x); };
    f.gradient = [am, bv](const Vector& x) { return Vector(*am * x + *bv); };
    q.problem.locals.push_back(std::move(f));
    a_sum += a[i];
    b_sum += b[i];
    Eigen::SelfAdjointEigenSolver<Matrix> es(a[i]);
    q.gradient_lipschitz =
        std::max(q.gradient_lipschitz, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_sum);
  q.strong_convexity = es.eigenvalues().minCoeff();
  if (!(q.strong_convexity > 0.0)) {
    throw InvalidArgument("sum of quadratic terms is not positive definite");
  }
  Vector x_star = a_sum.ldlt().solve(-b_sum);
  q.problem.x_star = x_star;
  q.problem.f_star = q.problem.global_eval(x_star);
  return q;
}

QuadraticProblem synthetic_quadratic_problem(int agents, int m, std::uint64_t seed) {
  if (agents < 1 || m < 1) throw InvalidArgument("need positive agents and dim");
  RngStream rng(seed, StreamPurpose::kDataset, 0);
  std::vector<Matrix> a;
  std::vector<Vector> b;
  const Matrix eye = Matrix::Identity(m, m);
  for (int i = 0; i < agents; i += 2) {
    if (i + 1 == agents) {
      a.push_back(eye);
      b.push_back(rng.normal_vector(m));
      break;
    }
    // A pair I + R, I - R with ||R||_2 = 2 sums to 2I while one member has
    // an eigenvalue of -1.
    Matrix r = Matrix::Zero(m, m);
    for (int u = 0; u < m; ++u) {
      for (int v = u; v < m; ++v) r(u, v) = r(v, u) = rng.normal();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(r);
    r *= 2.0 / es.eigenvalues().cwiseAbs().maxCoeff();
    a.push_back(eye + r);
    a.push_back(eye - r);
    b.push_back(rng.normal_vector(m));
    b.push_back(rng.normal_vector(m));
  }
  return quadratic_problem(a, b);
}

}  // namespace rgfdgd
