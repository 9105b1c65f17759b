#include "rgfdgd/zeroth_order.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "rgfdgd/error.hpp"

namespace rgfdgd {
namespace {

std::string format_point(const Vector& x) {
  std::string s = "(";
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (j) s += ", ";
    s += fmt::format("{}", x[j]);
  }
  return s + ")";
}

void check_mu_positive(double mu) {
  if (!(mu > 0.0)) {
    throw InvalidArgument(fmt::format(
        "smoothing parameter mu must be positive for the oracle, got {}", mu));
  }
}

void check_dim(const CostFunction& f, const Vector& x) {
  if (x.size() != f.dim) {
    throw InvalidArgument(fmt::format("point has dimension {} but cost {} expects {}",
                                      x.size(), f.name, f.dim));
  }
}

// Welford accumulator for a vector-valued sample.
class RunningMoments {
 public:
  explicit RunningMoments(int dim) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

  void add(const Vector& v) {
    ++count_;
    Vector delta = v - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(v - mean_);
  }

  const Vector& mean() const { return mean_; }

  Vector std_error() const {
    if (count_ < 2) return Vector::Zero(mean_.size());
    const double c = static_cast<double>(count_);
    return (m2_ / (c - 1.0) / c).cwiseSqrt();
  }

 private:
  std::int64_t count_ = 0;
  Vector mean_;
  Vector m2_;
};

}  // namespace

double evaluate_checked(const CostFunction& f, const Vector& x) {
  double v = f.eval(x);
  if (!std::isfinite(v)) {
    throw NonFiniteValue(fmt::format("cost {} returned {} at x = {}",
                                     f.name.empty() ? "<unnamed>" : f.name, v,
                                     format_point(x)));
  }
  return v;
}

CountingCost count_evaluations(const CostFunction& f) {
  auto counter = std::make_shared<std::atomic<std::int64_t>>(0);
  CostFunction wrapped = f;
  wrapped.eval = [inner = f.eval, counter](const Vector& x) {
    counter->fetch_add(1, std::memory_order_relaxed);
    return inner(x);
  };
  return {std::move(wrapped), std::move(counter)};
}

GaussianDirection sample_direction(int m, RngStream& stream) {
  GaussianDirection d;
  d.stream_id = stream.stream_id();
  d.draw_index = stream.draws();
  d.zeta = stream.normal_vector(m);
  return d;
}

Vector gf_oracle(const CostFunction& f, const Vector& x, double mu,
                 const GaussianDirection& zeta) {
  check_mu_positive(mu);
  check_dim(f, x);
  if (zeta.zeta.size() != x.size()) {
    throw InvalidArgument("direction and point dimensions differ");
  }
  const double shifted = evaluate_checked(f, x + mu * zeta.zeta);
  const double base = evaluate_checked(f, x);
  return ((shifted - base) / mu) * zeta.zeta;
}

McEstimate smoothed_value_mc(const CostFunction& f, const Vector& x, double mu,
                             int n_samples, RngStream& stream) {
  check_dim(f, x);
  if (!(mu >= 0.0)) {
    throw InvalidArgument(fmt::format("mu must be nonnegative, got {}", mu));
  }
  if (n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  if (mu == 0.0) return {evaluate_checked(f, x), 0.0};

  RunningMoments acc(1);
  Vector sample(1);
  for (int s = 0; s < n_samples; ++s) {
    sample[0] = evaluate_checked(f, x + mu * stream.normal_vector(f.dim));
    acc.add(sample);
  }
  return {acc.mean()[0], acc.std_error()[0]};
}

McVectorEstimate smoothed_grad_mc(const CostFunction& f, const Vector& x,
                                  double mu, int n_samples, RngStream& stream) {
  check_mu_positive(mu);
  check_dim(f, x);
  if (n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  RunningMoments acc(f.dim);
  for (int s = 0; s < n_samples; ++s) {
    acc.add(gf_oracle(f, x, mu, sample_direction(f.dim, stream)));
  }
  return {acc.mean(), acc.std_error()};
}

SecondMomentCheck oracle_second_moment_check(const CostFunction& f,
                                             const Vector& x, double mu,
                                             int n_samples, RngStream& stream) {
  if (!f.lipschitz_hint) {
    throw InvalidArgument(fmt::format(
        "cost {} has no Lipschitz hint; the second-moment bound needs one", f.name));
  }
  check_mu_positive(mu);
  if (n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  double sum = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    sum += gf_oracle(f, x, mu, sample_direction(f.dim, stream)).squaredNorm();
  }
  const double b = (f.dim + 4) * *f.lipschitz_hint;
  return {sum / n_samples, b * b};
}

double estimate_lipschitz_on_box(const CostFunction& f, double lo, double hi,
                                 int samples, std::uint64_t seed) {
  if (!(hi > lo) || samples < 2) {
    throw InvalidArgument("Lipschitz scan needs hi > lo and at least two samples");
  }
  const double h = 1e-6 * std::max(1.0, hi - lo);
  auto grad_norm = [&](const Vector& x) {
    double sq = 0.0;
    for (int j = 0; j < f.dim; ++j) {
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      double d = (evaluate_checked(f, xp) - evaluate_checked(f, xm)) / (2 * h);
      sq += d * d;
    }
    return std::sqrt(sq);
  };
  double best = 0.0;
  if (f.dim == 1) {
    Vector x(1);
    for (int s = 0; s < samples; ++s) {
      x[0] = lo + (hi - lo) * s / (samples - 1);
      best = std::max(best, grad_norm(x));
    }
    return best;
  }
  RngStream rng(seed, StreamPurpose::kProbe, 0);
  Vector x(f.dim);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < f.dim; ++j) x[j] = rng.uniform(lo, hi);
    best = std::max(best, grad_norm(x));
  }
  return best;
}

}  // namespace rgfdgd
