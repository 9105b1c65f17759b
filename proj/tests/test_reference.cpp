#include <cmath>

#include "doctest.h"
#include "rgfdgd/error.hpp"
#include "rgfdgd/problems.hpp"
#include "rgfdgd/reference.hpp"

using namespace rgfdgd;
using namespace rgfdgd::reference;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("minimize_1d on simple parabolas") {
  auto a = minimize_1d([](double x) { return x * x; }, -1, 1);
  CHECK(std::abs(a.x_star[0]) < 1e-8);
  CHECK(std::abs(a.f_star) < 1e-10);
  auto b = minimize_1d([](double x) { return (x - 3) * (x - 3) + 7; }, 0, 10);
  CHECK(std::abs(b.x_star[0] - 3.0) < 1e-8);
  CHECK(std::abs(b.f_star - 7.0) < 1e-10);
  CHECK_FALSE(b.certificate.empty());
}

TEST_CASE("minimize_1d rejects a boundary minimum") {
  CHECK_THROWS_AS(minimize_1d([](double x) { return x; }, 0, 1), Error);
  CHECK_THROWS_AS(minimize_1d([](double x) { return x * x; }, 1, 0), InvalidArgument);
}

TEST_CASE("polynomial global minimum is stationary") {
  auto p = polynomial_example();
  auto f = [&p](double x) { return p.global_eval(vec({x})); };
  auto r = minimize_1d(f, -50, 50);
  const double h = 1e-5;
  const double slope = (f(r.x_star[0] + h) - f(r.x_star[0] - h)) / (2 * h);
  CHECK(std::abs(slope) < 1e-5);
  CHECK(r.f_star == doctest::Approx(*p.f_star).epsilon(1e-12));
  // Global cost is convex, so no grid point may beat the minimizer.
  for (double x = -50; x <= 50; x += 0.01) CHECK(f(x) >= r.f_star - 1e-12);
}

TEST_CASE("property: tighter tolerance never raises f_star") {
  auto p = polynomial_example();
  auto f = [&p](double x) { return p.global_eval(vec({x})); };
  double prev = std::numeric_limits<double>::infinity();
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    auto r = minimize_1d(f, -50, 50, tol);
    CHECK(r.f_star <= prev + 1e-12);
    prev = r.f_star;
  }
}

TEST_CASE("minimize_smooth_convex") {
  SUBCASE("||x||^2 from (5, 5)") {
    auto r = minimize_smooth_convex([](const Vector& x) { return x.squaredNorm(); },
                                    [](const Vector& x) { return Vector(2.0 * x); }, vec({5, 5}));
    CHECK(r.x_star.norm() <= 1e-8);
  }
  SUBCASE("ridge only") {
    const double c = 0.3;
    auto r = minimize_smooth_convex([c](const Vector& x) { return c * x.squaredNorm(); },
                                    [c](const Vector& x) { return Vector(2.0 * c * x); },
                                    vec({1, -2, 3}));
    CHECK(r.x_star.norm() <= 1e-8);
    CHECK(r.f_star <= 1e-15);
  }
  SUBCASE("ill-conditioned quadratic") {
    Vector scale = vec({1.0, 100.0, 1e4});
    auto r = minimize_smooth_convex(
        [scale](const Vector& x) { return 0.5 * x.dot(scale.cwiseProduct(x)) - x.sum(); },
        [scale](const Vector& x) { return Vector(scale.cwiseProduct(x).array() - 1.0); },
        Vector::Zero(3));
    CHECK((r.x_star - scale.cwiseInverse()).norm() < 1e-8);
  }
  SUBCASE("logistic dataset reaches the gradient tolerance") {
    auto data = synthetic_logistic_dataset(4, 2, 20, 0.1, 3);
    auto p = logistic_problem(data);
    CHECK(p.global_gradient(*p.x_star).norm() <= 1e-8);
  }
  SUBCASE("iteration cap reports the gradient norm") {
    try {
      Vector scale = vec({1.0, 100.0, 1e4});
      minimize_smooth_convex(
          [scale](const Vector& x) { return 0.5 * x.dot(scale.cwiseProduct(x)) - x.sum(); },
          [scale](const Vector& x) { return Vector(scale.cwiseProduct(x).array() - 1.0); },
          Vector::Zero(3), 1e-12, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("||grad||") != std::string::npos);
    }
  }
}

TEST_CASE("finite differences") {
  const Vector c = vec({1.0, -2.0, 0.5});
  const Vector g = finite_diff_gradient([c](const Vector& x) { return c.dot(x); },
                                        vec({0.3, 0.1, -4}), 0.1);
  CHECK((g - c).norm() < 1e-12);
  const Vector q = finite_diff_gradient([](const Vector& x) { return x.squaredNorm(); },
                                        vec({1, 2}), 1e-5);
  CHECK((q - vec({2, 4})).norm() < 1e-8);
  CHECK_THROWS_AS(finite_diff_gradient([](const Vector&) { return 0.0; }, vec({1}), 0.0),
                  InvalidArgument);
}

TEST_CASE("property: finite differences converge at second order on cubics") {
  auto f = [](const Vector& x) {
    return x[0] * x[0] * x[0] - 2 * x[0] * x[1] * x[1] + 0.5 * x[1] * x[1] * x[1];
  };
  auto grad = [](const Vector& x) {
    return vec({3 * x[0] * x[0] - 2 * x[1] * x[1], -4 * x[0] * x[1] + 1.5 * x[1] * x[1]});
  };
  const Vector x = vec({0.7, -1.3});
  double h = 0.1;
  double prev = (finite_diff_gradient(f, x, h) - grad(x)).norm();
  for (int level = 0; level < 3; ++level) {
    h /= 2;
    const double err = (finite_diff_gradient(f, x, h) - grad(x)).norm();
    CHECK(prev / err == doctest::Approx(4.0).epsilon(0.01));
    prev = err;
  }
}

TEST_CASE("smoothed polynomial: oracle mean matches the smoothed-value slope") {
  auto p = polynomial_example();
  const auto& f1 = p.locals[0];
  const double mu = 0.5;
  for (double x0 : {-3.0, 2.0}) {
    RngStream a(10, StreamPurpose::kMonteCarlo, 0), b(10, StreamPurpose::kMonteCarlo, 1);
    auto fd = smoothed_value_fd_gradient(f1, vec({x0}), mu, 1e-3, 100000, a);
    auto g = smoothed_grad_mc(f1, vec({x0}), mu, 100000, b);
    const double se = std::hypot(fd.std_error[0], g.std_error[0]);
    CHECK(std::abs(fd.value[0] - g.value[0]) <= 4.0 * se);
  }
}

TEST_CASE("matrix power limit") {
  SUBCASE("n = 1 is exact") {
    auto w = make_weight_set(Matrix::Ones(1, 1), Matrix::Ones(1, 1), 0.3);
    auto r = matrix_power_limit(w.w_aug);
    Matrix expected(2, 2);
    expected << 1, 1, 0, 0;
    CHECK((r.limit - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("ring(2), eps = 1e-3") {
    auto w = make_weight_set(DirectedGraph::ring(2), 1e-3);
    auto r = matrix_power_limit(w.w_aug);
    CHECK((r.limit - averaging_limit(2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r.limit * w.w_aug - r.limit).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("eps = 0 leaves the surplus decoupled") {
    auto [w_r, w_c] = equal_neighbor_weights(four_agent_graph());
    auto r = matrix_power_limit(augment(w_r, w_c, 0.0));
    // Decisions reach a consensus that ignores the surplus: the top-right
    // block stays zero instead of 11^T/n.
    CHECK(r.limit.topRightCorner(4, 4).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.limit - averaging_limit(4)).cwiseAbs().maxCoeff() > 0.1);
  }
  SUBCASE("property: the limit is idempotent under another multiplication") {
    for (double eps : {1e-3, 0.05, 0.2}) {
      auto w = make_weight_set(four_agent_graph(), eps);
      auto r = matrix_power_limit(w.w_aug);
      CHECK((r.limit * w.w_aug - r.limit).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((r.limit * r.limit - r.limit).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("no convergence is an error") {
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK_THROWS_AS(matrix_power_limit(swap), Error);
  }
}
