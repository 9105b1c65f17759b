#include "rgfdgd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "rgfdgd/error.hpp"

namespace rgfdgd {

StepSchedule::StepSchedule(double a, double p, double k0) : a_(a), p_(p), k0_(k0) {
  if (!(p > 0.5 && p <= 1.0)) {
    throw InvalidArgument(fmt::format(
        "step exponent p = {} outside (0.5, 1]: the step sizes must be non-summable "
        "and square-summable",
        p));
  }
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw InvalidArgument(fmt::format("step scale a must be finite and >= 0, got {}", a));
  }
  if (!(k0 >= 0.0) || !std::isfinite(k0)) {
    throw InvalidArgument(fmt::format("step offset k0 must be finite and >= 0, got {}", k0));
  }
}

double StepSchedule::operator()(std::int64_t k) const {
  return a_ / std::pow(static_cast<double>(k) + k0_ + 1.0, p_);
}

NetworkState step(const NetworkState& state, const WeightSet& weights,
                  const ProblemInstance& problem, double mu, double alpha,
                  std::span<RngStream> streams, Matrix* oracles) {
  const int n = state.agents();
  const int m = state.dim();
  if (weights.agents() != n || problem.agents() != n ||
      static_cast<int>(streams.size()) != n) {
    throw InvalidArgument(fmt::format(
        "state has {} agents, weights {}, problem {}, streams {}", n,
        weights.agents(), problem.agents(), streams.size()));
  }
  if (problem.m != m || state.y.rows() != n || state.y.cols() != m) {
    throw InvalidArgument("state and problem dimensions disagree");
  }
  if (!(alpha >= 0.0)) throw InvalidArgument("step size must be nonnegative");

  Matrix g(n, m);
  for (int i = 0; i < n; ++i) {
    Vector xi = state.x.row(i).transpose();
    g.row(i) = gf_oracle(problem.locals[i], xi, mu,
                         sample_direction(m, streams[i]))
                   .transpose();
  }

  const Matrix mixed = weights.w_r * state.x;
  NetworkState next;
  next.k = state.k + 1;
  next.x = mixed + weights.epsilon * state.y - alpha * g;
  next.y = state.x - mixed + weights.w_c * state.y - weights.epsilon * state.y;

  auto blown = [](const Matrix& v) {
    return !v.allFinite() || v.cwiseAbs().maxCoeff() > kDivergenceThreshold;
  };
  if (blown(next.x) || blown(next.y)) {
    throw DivergenceError(
        fmt::format("iterates diverged at iteration {} (|coordinate| > {} or non-finite)",
                    next.k, kDivergenceThreshold),
        next.k);
  }
  if (oracles) *oracles = std::move(g);
  return next;
}

Vector theta_bar(const NetworkState& state) {
  return (state.x.colwise().sum() + state.y.colwise().sum()).transpose() /
         static_cast<double>(state.agents());
}

namespace {

Vector agent_deviation(const NetworkState& state, const Vector& avg) {
  return (state.x.rowwise() - avg.transpose()).rowwise().norm();
}

}  // namespace

double consensus_error(const NetworkState& state) {
  return agent_deviation(state, theta_bar(state)).sum();
}

double optimality_error(const NetworkState& state, const ProblemInstance& problem) {
  if (!problem.f_star) {
    throw InvalidArgument(fmt::format("problem {} has no known optimal value", problem.name));
  }
  return problem.global_eval(theta_bar(state)) - *problem.f_star;
}

double optimality_gap_bound(int n, int m, double mu, double d_hat) {
  return 2.0 * n * std::sqrt(static_cast<double>(m)) * mu * d_hat;
}

double solution_gap_bound(int n, int m, double mu, double big_l, double chi,
                          double rho) {
  if (!(chi > 0.0) || !(big_l > 0.0) || n < 1 || m < 1) {
    throw InvalidArgument("solution_gap_bound needs n, m >= 1 and chi, L > 0");
  }
  const double rho_max = chi / (static_cast<double>(n) * n * big_l * big_l);
  if (!(rho > 0.0) || rho > rho_max) {
    throw InvalidArgument(
        fmt::format("rho = {} outside the admissible interval (0, {}]", rho, rho_max));
  }
  // rho / (1 - sqrt(1 - rho chi)) rewritten as (1 + sqrt(1 - rho chi)) / chi;
  // the direct form cancels badly because rho chi is usually tiny.
  const double contraction = std::sqrt(1.0 - rho * chi);
  return n * std::pow(m + 3.0, 1.5) * big_l * mu * (1.0 + contraction) / (2.0 * chi);
}

bool Cadence::records(std::int64_t k, std::int64_t total) const {
  if (k == 0 || k == total) return true;
  switch (kind) {
    case Kind::kEvery:
      return k % every == 0;
    case Kind::kAuto:
      if (total <= 10'000) return true;
      [[fallthrough]];
    case Kind::kLog: {
      // Every iteration up to 1000, then roughly 200 points per decade.
      if (k <= 1000) return true;
      auto bucket = [](std::int64_t v) {
        return static_cast<std::int64_t>(std::floor(200.0 * std::log10(static_cast<double>(v))));
      };
      return bucket(k) != bucket(k - 1);
    }
  }
  return true;
}

NetworkState initial_state(const InitialStateSpec& spec, int n, int m,
                           std::uint64_t seed) {
  NetworkState s;
  s.x = Matrix::Zero(n, m);
  s.y = Matrix::Zero(n, m);
  auto fill = [&](Matrix& target, const std::vector<std::vector<double>>& pts,
                  const char* what) {
    if (static_cast<int>(pts.size()) != n) {
      throw InvalidArgument(fmt::format("{} lists {} points for {} agents", what,
                                        pts.size(), n));
    }
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(pts[i].size()) != m) {
        throw InvalidArgument(fmt::format("{} point {} has dimension {}, expected {}",
                                          what, i + 1, pts[i].size(), m));
      }
      for (int j = 0; j < m; ++j) target(i, j) = pts[i][j];
    }
  };
  switch (spec.kind) {
    case InitialStateSpec::Kind::kZeros:
      break;
    case InitialStateSpec::Kind::kBox:
      if (!(spec.box_hi >= spec.box_lo)) {
        throw InvalidArgument("initial box needs lo <= hi");
      }
      for (int i = 0; i < n; ++i) {
        RngStream rng(seed, StreamPurpose::kInitialState, static_cast<std::uint64_t>(i));
        for (int j = 0; j < m; ++j) s.x(i, j) = rng.uniform(spec.box_lo, spec.box_hi);
      }
      break;
    case InitialStateSpec::Kind::kPoints:
      fill(s.x, spec.points, "initial x");
      break;
  }
  if (!spec.y_points.empty()) fill(s.y, spec.y_points, "initial y");
  if (!s.x.allFinite() || !s.y.allFinite()) {
    throw InvalidArgument("initial state has non-finite coordinates");
  }
  return s;
}

std::vector<RngStream> oracle_streams(std::uint64_t seed, int n) {
  std::vector<RngStream> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i) {
    streams.emplace_back(seed, StreamPurpose::kOracle, static_cast<std::uint64_t>(i));
  }
  return streams;
}

double mass_residual(const NetworkState& before, const NetworkState& after,
                     double alpha, const Matrix& oracles) {
  const Eigen::RowVectorXd mass_before =
      before.x.colwise().sum() + before.y.colwise().sum();
  const Eigen::RowVectorXd mass_after = after.x.colwise().sum() + after.y.colwise().sum();
  const Eigen::RowVectorXd push = alpha * oracles.colwise().sum();
  const double scale = std::max(
      {1.0, before.x.cwiseAbs().sum() + before.y.cwiseAbs().sum(),
       after.x.cwiseAbs().sum() + after.y.cwiseAbs().sum(), alpha * oracles.cwiseAbs().sum()});
  return (mass_after - (mass_before - push)).cwiseAbs().maxCoeff() / scale;
}

namespace {

TraceRecord make_record(const NetworkState& s, double alpha,
                        const ProblemInstance& problem) {
  TraceRecord r;
  r.k = s.k;
  r.alpha = alpha;
  r.theta_bar = theta_bar(s);
  r.agent_deviation = agent_deviation(s, r.theta_bar);
  r.consensus_error = r.agent_deviation.sum();
  if (problem.f_star) r.optimality_error = problem.global_eval(r.theta_bar) - *problem.f_star;
  return r;
}

}  // namespace

RunResult run(const RunSetup& setup) {
  const int n = setup.problem.agents();
  const int m = setup.problem.m;
  if (setup.weights.agents() != n) {
    throw InvalidArgument(fmt::format("weights cover {} agents but the problem has {}",
                                      setup.weights.agents(), n));
  }
  if (!(setup.mu > 0.0)) {
    throw InvalidArgument(fmt::format("mu must be positive, got {}", setup.mu));
  }
  if (setup.iterations < 1) throw InvalidArgument("iterations must be at least 1");

  RunResult result;
  result.trace.n = n;
  result.trace.m = m;
  result.trace.has_optimality = setup.problem.f_star.has_value();

  NetworkState state = initial_state(setup.init, n, m, setup.seed);
  auto streams = oracle_streams(setup.seed, n);
  Matrix oracles;
  for (std::int64_t k = 0;; ++k) {
    const double alpha = setup.schedule(k);
    if (setup.cadence.records(k, setup.iterations)) {
      result.trace.records.push_back(make_record(state, alpha, setup.problem));
    }
    if (k == setup.iterations) break;
    try {
      NetworkState next =
          step(state, setup.weights, setup.problem, setup.mu, alpha, streams, &oracles);
      if (setup.check_mass) {
        result.max_mass_residual =
            std::max(result.max_mass_residual, mass_residual(state, next, alpha, oracles));
      }
      state = std::move(next);
    } catch (const DivergenceError& e) {
      result.error = e.what();
      result.failed_iteration = e.iteration();
      break;
    } catch (const NonFiniteValue& e) {
      result.error = e.what();
      result.failed_iteration = k + 1;
      break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "k,alpha,consensus_error";
  if (trace.has_optimality) os << ",optimality_error";
  for (int j = 1; j <= trace.m; ++j) os << ",theta_bar_" << j;
  for (int i = 1; i <= trace.n; ++i) os << ",agent_dev_" << i;
  os << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << fmt::format("{},{}", r.alpha, r.consensus_error);
    if (trace.has_optimality) os << ',' << fmt::format("{}", *r.optimality_error);
    for (Eigen::Index j = 0; j < r.theta_bar.size(); ++j) {
      os << ',' << fmt::format("{}", r.theta_bar[j]);
    }
    for (Eigen::Index i = 0; i < r.agent_deviation.size(); ++i) {
      os << ',' << fmt::format("{}", r.agent_deviation[i]);
    }
    os << '\n';
  }
}

RunTrace read_trace_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.empty()) {
    throw InvalidArgument("trace is empty");
  }
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 3 || cols[0] != "k" || cols[1] != "alpha" || cols[2] != "consensus_error") {
    throw InvalidArgument("trace header must start with k,alpha,consensus_error");
  }
  RunTrace t;
  std::size_t pos = 3;
  if (pos < cols.size() && cols[pos] == "optimality_error") {
    t.has_optimality = true;
    ++pos;
  }
  const std::size_t theta_start = pos;
  while (pos < cols.size() && cols[pos].rfind("theta_bar_", 0) == 0) ++pos;
  t.m = static_cast<int>(pos - theta_start);
  const std::size_t dev_start = pos;
  while (pos < cols.size() && cols[pos].rfind("agent_dev_", 0) == 0) ++pos;
  t.n = static_cast<int>(pos - dev_start);
  if (pos != cols.size()) {
    throw InvalidArgument(fmt::format("unexpected trace column '{}'", cols[pos]));
  }

  std::string line;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument(fmt::format("trace line {}: bad number '{}'", lineno, cell));
      }
    }
    if (v.size() != cols.size()) {
      throw InvalidArgument(fmt::format("trace line {}: expected {} fields, found {}",
                                        lineno, cols.size(), v.size()));
    }
    TraceRecord r;
    r.k = static_cast<std::int64_t>(v[0]);
    r.alpha = v[1];
    r.consensus_error = v[2];
    if (t.has_optimality) r.optimality_error = v[3];
    r.theta_bar = Eigen::Map<Vector>(v.data() + theta_start, t.m);
    r.agent_deviation = Eigen::Map<Vector>(v.data() + dev_start, t.n);
    t.records.push_back(std::move(r));
  }
  if (t.records.empty()) throw InvalidArgument("trace has a header but no records");
  return t;
}

}  // namespace rgfdgd
