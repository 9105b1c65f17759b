#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rgfdgd/error.hpp"
#include "rgfdgd/graph.hpp"

using namespace rgfdgd;

namespace {

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

DirectedGraph random_graph(int n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i != j && keep(rng)) edges.push_back({i, j});
    }
  }
  return DirectedGraph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("single node gets a self-loop") {
  auto g = DirectedGraph::from_edges(1, {});
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0] == Edge{1, 1});
  CHECK(g.in_neighbors(1) == std::vector<int>{1});
  CHECK(g.out_neighbors(1) == std::vector<int>{1});
  CHECK(g.is_strongly_connected());
  CHECK(g.cross_edges().empty());
}

TEST_CASE("duplicates collapse and self-loops are completed") {
  auto g = DirectedGraph::from_edges(3, {{1, 2}, {1, 2}, {2, 2}, {2, 3}, {3, 1}});
  CHECK(g.edges().size() == 6);
  CHECK(g.cross_edges() == std::vector<Edge>{{1, 2}, {2, 3}, {3, 1}});
  for (int i = 1; i <= 3; ++i) CHECK(g.has_edge(i, i));
}

TEST_CASE("out-of-range endpoint names the pair") {
  try {
    DirectedGraph::from_edges(3, {{1, 2}, {2, 4}});
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("(2, 4)") != std::string::npos);
  }
  CHECK_THROWS_AS(DirectedGraph::from_edges(3, {{0, 1}}), InvalidArgument);
  CHECK_THROWS_AS(DirectedGraph::from_edges(0, {}), InvalidArgument);
}

TEST_CASE("chain without back edge is not strongly connected") {
  auto g = DirectedGraph::from_edges(3, {{1, 2}, {2, 3}});
  CHECK_FALSE(g.is_strongly_connected());
}

TEST_CASE("ring construction") {
  SUBCASE("n = 2") {
    auto g = DirectedGraph::ring(2);
    CHECK(g.edges() == std::vector<Edge>{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  }
  SUBCASE("n = 5 has one in- and one out-neighbor besides self") {
    auto g = DirectedGraph::ring(5);
    CHECK(g.is_strongly_connected());
    for (int i = 1; i <= 5; ++i) {
      CHECK(g.in_neighbors(i).size() == 2);
      CHECK(g.out_neighbors(i).size() == 2);
    }
  }
  SUBCASE("ring(3) neighbor sets") {
    auto g = DirectedGraph::ring(3);
    CHECK(g.in_neighbors(2) == std::vector<int>{1, 2});
    CHECK(g.out_neighbors(2) == std::vector<int>{2, 3});
  }
  SUBCASE("n = 100") {
    auto g = DirectedGraph::ring(100);
    CHECK(g.size() == 100);
    CHECK(g.cross_edges().size() == 100);
    CHECK(g.has_edge(100, 1));
  }
  CHECK_THROWS_AS(DirectedGraph::ring(1), InvalidArgument);
  CHECK_THROWS_AS(DirectedGraph::ring(0), InvalidArgument);
}

TEST_CASE("neighbor queries reject out-of-range indices") {
  auto g = DirectedGraph::ring(3);
  CHECK_THROWS_AS(g.in_neighbors(0), InvalidArgument);
  CHECK_THROWS_AS(g.out_neighbors(4), InvalidArgument);
}

TEST_CASE("four-agent graph") {
  auto g = four_agent_graph();
  CHECK(g.size() == 4);
  CHECK(g.is_strongly_connected());
  CHECK(g.cross_edges().size() == 6);
  // Unequal neighbor counts, so the equal-neighbor weights are not doubly
  // stochastic.
  CHECK(g.in_neighbors(2).size() == 3);
  CHECK(g.in_neighbors(1).size() == 2);
  CHECK(g.out_neighbors(1).size() == 3);
}

TEST_CASE("ring is strongly connected for every n") {
  for (int n = 2; n <= 60; ++n) CHECK(DirectedGraph::ring(n).is_strongly_connected());
}

TEST_CASE("property: transpose symmetry and self-loops on random graphs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    auto g = random_graph(n, 0.3, rng);
    for (int i = 1; i <= n; ++i) {
      CHECK(contains(g.in_neighbors(i), i));
      CHECK(contains(g.out_neighbors(i), i));
      for (int j = 1; j <= n; ++j) {
        CHECK(contains(g.in_neighbors(j), i) == contains(g.out_neighbors(i), j));
      }
    }
  }
}

TEST_CASE("relabeling preserves structure") {
  auto g = four_agent_graph();
  std::vector<int> perm{3, 1, 4, 2};
  auto h = g.permuted(perm);
  CHECK(h.is_strongly_connected());
  for (const auto& e : g.edges()) CHECK(h.has_edge(perm[e.from - 1], perm[e.to - 1]));
  CHECK(h.edges().size() == g.edges().size());
  std::vector<int> identity(4);
  std::iota(identity.begin(), identity.end(), 1);
  CHECK(g.permuted(identity) == g);
  CHECK_THROWS_AS(g.permuted({1, 1, 2, 3}), InvalidArgument);
}
