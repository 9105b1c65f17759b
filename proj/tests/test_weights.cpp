#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rgfdgd/error.hpp"
#include "rgfdgd/reference.hpp"
#include "rgfdgd/weights.hpp"

using namespace rgfdgd;

namespace {

// Random strongly connected graph: a ring backbone under a random relabeling
// plus random chords.
DirectedGraph random_connected(int n, std::mt19937_64& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({order[i], order[(i + 1) % n]});
  std::bernoulli_distribution chord(0.2);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i != j && chord(rng)) edges.push_back({i, j});
    }
  }
  return DirectedGraph::from_edges(n, edges);
}

Matrix permutation_matrix(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(perm[i] - 1, i) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("ring(2) equal-neighbor weights") {
  auto [w_r, w_c] = equal_neighbor_weights(DirectedGraph::ring(2));
  Matrix half = Matrix::Constant(2, 2, 0.5);
  CHECK((w_r - half).cwiseAbs().maxCoeff() == 0.0);
  CHECK((w_c - half).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ring(5) rows carry two entries of one half") {
  auto [w_r, w_c] = equal_neighbor_weights(DirectedGraph::ring(5));
  for (int i = 0; i < 5; ++i) {
    int halves = 0;
    for (int j = 0; j < 5; ++j) {
      if (w_r(i, j) == 0.5) ++halves;
      else CHECK(w_r(i, j) == 0.0);
    }
    CHECK(halves == 2);
  }
}

TEST_CASE("four-agent weights follow the neighbor counts") {
  auto g = four_agent_graph();
  auto [w_r, w_c] = equal_neighbor_weights(g);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      const double r = g.has_edge(j, i) ? 1.0 / static_cast<double>(g.in_neighbors(i).size()) : 0.0;
      const double c = g.has_edge(j, i) ? 1.0 / static_cast<double>(g.out_neighbors(j).size()) : 0.0;
      CHECK(w_r(i - 1, j - 1) == doctest::Approx(r).epsilon(1e-15));
      CHECK(w_c(i - 1, j - 1) == doctest::Approx(c).epsilon(1e-15));
    }
  }
  check_row_stochastic(w_r);
  check_column_stochastic(w_c);
  // Not doubly stochastic, which is why the surplus is needed.
  CHECK(std::abs(w_r.colwise().sum().maxCoeff() - 1.0) > 1e-3);
}

TEST_CASE("weights reject graphs that are not strongly connected") {
  CHECK_THROWS_AS(equal_neighbor_weights(DirectedGraph::from_edges(3, {{1, 2}, {2, 3}})),
                  InvalidArgument);
}

TEST_CASE("stochasticity checks") {
  Matrix bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.4;
  CHECK_THROWS_AS(check_row_stochastic(bad), InvalidArgument);
  CHECK_NOTHROW(check_column_stochastic(bad));
  Matrix negative(2, 2);
  negative << 1.5, -0.5, 0.0, 1.0;
  CHECK_THROWS_AS(check_row_stochastic(negative), InvalidArgument);
  CHECK_THROWS_AS(make_weight_set(bad, bad, 0.1), InvalidArgument);
}

TEST_CASE("augment assembles the blocks") {
  auto [w_r, w_c] = equal_neighbor_weights(DirectedGraph::ring(2));
  SUBCASE("eps = 0") {
    Matrix a = augment(w_r, w_c, 0.0);
    CHECK(a.topLeftCorner(2, 2) == w_r);
    CHECK(a.topRightCorner(2, 2).isZero(0.0));
    CHECK(a.bottomLeftCorner(2, 2) == Matrix::Identity(2, 2) - w_r);
    CHECK(a.bottomRightCorner(2, 2) == w_c);
  }
  SUBCASE("eps = 0.1, hand-assembled") {
    Matrix expected(4, 4);
    expected << 0.5, 0.5, 0.1, 0.0,
                0.5, 0.5, 0.0, 0.1,
                0.5, -0.5, 0.4, 0.5,
                -0.5, 0.5, 0.5, 0.4;
    Matrix a = augment(w_r, w_c, 0.1);
    CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((a.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(augment(w_r, Matrix::Identity(3, 3), 0.1), InvalidArgument);
  CHECK_THROWS_AS(augment(w_r, w_c, -0.1), InvalidArgument);
}

TEST_CASE("property: augmented columns sum to one on random graphs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps_dist(0.0, 0.9);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 19);
    auto w = make_weight_set(random_connected(n, rng), eps_dist(rng));
    CHECK((w.w_aug.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spectral report on ring(2)") {
  auto [w_r, w_c] = equal_neighbor_weights(DirectedGraph::ring(2));
  // Brute force: the eps = 0 matrix is block lower triangular, so its
  // spectrum is that of W_r and W_c: {1, 0} twice.
  auto moduli = eigenvalue_moduli(augment(w_r, w_c, 0.0));
  REQUIRE(moduli.size() == 4);
  CHECK(moduli[0] == doctest::Approx(1.0));
  CHECK(moduli[1] == doctest::Approx(1.0));
  CHECK(moduli[2] < 1.0);
  auto rep = spectral_report(w_r, w_c, 0.1);
  CHECK(rep.lambda3 == doctest::Approx(moduli[2]));
  CHECK(rep.epsilon_bar == doctest::Approx(epsilon_bar(rep.lambda3, 2)));
}

TEST_CASE("epsilon_bar formula") {
  for (int n : {1, 2, 4, 10}) {
    CHECK(epsilon_bar(0.0, n) == doctest::Approx(1.0 / std::pow(20.0 + 8.0 * n, n)));
  }
  CHECK(epsilon_bar(0.5, 4) == doctest::Approx(std::pow(0.5, 4) / std::pow(52.0, 4)));
  // Tiny even for four agents; runs do not enforce it.
  auto w = make_weight_set(four_agent_graph(), 0.1);
  CHECK(spectral_report(w.w_r, w.w_c, 0.1).epsilon_bar < 1e-6);
}

TEST_CASE("spectral report rejects non-stochastic input") {
  Matrix bad = Matrix::Constant(2, 2, 0.7);
  CHECK_THROWS_AS(spectral_report(bad, bad, 0.1), InvalidArgument);
}

TEST_CASE("geometric decay on ring(2) with eps = 1e-3") {
  auto w = make_weight_set(DirectedGraph::ring(2), 1e-3);
  auto d = geometric_decay_check(w.w_aug, 200);
  REQUIRE(d.size() == 200);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].deviation <= d[i - 1].deviation + 1e-15);
  auto fit = fit_log_linear(std::vector<DecayPoint>(d.begin() + 100, d.end()));
  CHECK(fit.slope < 0.0);
}

TEST_CASE("doubly stochastic weights decay the same way") {
  auto [w_r, w_c] = equal_neighbor_weights(DirectedGraph::ring(6));
  REQUIRE((w_r - w_c).cwiseAbs().maxCoeff() < 1e-15);
  auto d = geometric_decay_check(augment(w_r, w_c, 1e-3), 300);
  auto fit = fit_log_linear(std::vector<DecayPoint>(d.begin() + 150, d.end()));
  CHECK(fit.slope < 0.0);
  CHECK(d.back().deviation < d.front().deviation);
}

TEST_CASE("property: fitted envelope bounds the decay within the window") {
  for (double eps : {1e-3, 0.05, 0.1}) {
    auto w = make_weight_set(four_agent_graph(), eps);
    auto rep = spectral_report(w.w_r, w.w_c, eps, 10, 200);
    CHECK(rep.decays);
    CHECK(rep.gamma_fit < 1.0);
    auto d = geometric_decay_check(w.w_aug, 200);
    for (int k = 10; k <= 200; ++k) {
      const double bound = rep.big_gamma_fit * std::pow(rep.gamma_fit, k);
      CHECK(d[k - 1].deviation <= bound * (1.0 + 1e-9));
    }
    // Eventually monotone.
    for (int k = 101; k <= 200; ++k) CHECK(d[k - 1].deviation <= d[k - 2].deviation);
  }
}

TEST_CASE("property: spectral report is invariant under relabeling") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 8);
    auto g = random_connected(n, rng);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    std::shuffle(perm.begin(), perm.end(), rng);
    auto [a_r, a_c] = equal_neighbor_weights(g);
    auto [b_r, b_c] = equal_neighbor_weights(g.permuted(perm));
    Matrix p = permutation_matrix(perm);
    CHECK((p * a_r * p.transpose() - b_r).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((p * a_c * p.transpose() - b_c).cwiseAbs().maxCoeff() < 1e-15);
    auto ra = spectral_report(a_r, a_c, 0.05);
    auto rb = spectral_report(b_r, b_c, 0.05);
    // Eigenvalues shared by the two diagonal blocks are defective, so only
    // about sqrt(machine epsilon) of them is reproducible.
    CHECK(std::abs(ra.lambda3 - rb.lambda3) < 1e-7);
  }
}

TEST_CASE("negative surplus diagonal is reported, not rejected") {
  auto g = four_agent_graph();
  auto w = make_weight_set(g, 0.4);
  auto neg = negative_surplus_diagonal(w);
  // Agents with 3 out-neighbors have W_c diagonal 1/3 < 0.4.
  for (int i : neg) CHECK(g.out_neighbors(i).size() == 3);
  CHECK_FALSE(neg.empty());
  CHECK(negative_surplus_diagonal(make_weight_set(g, 0.1)).empty());
}

TEST_CASE("averaging limit and power limit agree") {
  auto w = make_weight_set(four_agent_graph(), 0.1);
  auto lim = reference::matrix_power_limit(w.w_aug);
  CHECK((lim.limit - averaging_limit(4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("matrix csv round-trips") {
  auto w = make_weight_set(four_agent_graph(), 0.1);
  std::ostringstream os;
  write_matrix_csv(os, w.w_aug);
  std::istringstream is(os.str());
  std::string line;
  int row = 0;
  while (std::getline(is, line)) {
    std::stringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      CHECK(std::stod(cell) == w.w_aug(row, col));
      ++col;
    }
    CHECK(col == 8);
    ++row;
  }
  CHECK(row == 8);
}
