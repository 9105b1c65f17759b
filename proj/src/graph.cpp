#include "rgfdgd/graph.hpp"

#include <algorithm>
#include <queue>

#include <fmt/format.h>

#include "rgfdgd/error.hpp"

namespace rgfdgd {
namespace {

std::vector<bool> reachable_from(int start,
                                 const std::vector<std::vector<int>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::queue<int> frontier;
  seen[start] = true;
  frontier.push(start);
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v1 : adj[u]) {
      int v = v1 - 1;
      if (!seen[v]) {
        seen[v] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

}  // namespace

DirectedGraph::DirectedGraph(int n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), in_(n), out_(n) {
  for (const Edge& e : edges_) {
    out_[e.from - 1].push_back(e.to);
    in_[e.to - 1].push_back(e.from);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
  for (auto& v : out_) std::sort(v.begin(), v.end());
}

DirectedGraph DirectedGraph::from_edges(int n, const std::vector<Edge>& edges) {
  if (n < 1) {
    throw InvalidArgument(fmt::format("graph needs at least one agent, got n={}", n));
  }
  std::vector<Edge> all;
  all.reserve(edges.size() + n);
  for (const Edge& e : edges) {
    if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
      throw InvalidArgument(fmt::format(
          "edge ({}, {}) has an endpoint outside 1..{}", e.from, e.to, n));
    }
    all.push_back(e);
  }
  for (int i = 1; i <= n; ++i) all.push_back({i, i});
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return DirectedGraph(n, std::move(all));
}

DirectedGraph DirectedGraph::ring(int n) {
  if (n < 2) {
    throw InvalidArgument(fmt::format("ring needs n >= 2, got n={}", n));
  }
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) edges.push_back({i, i % n + 1});
  return from_edges(n, edges);
}

std::vector<Edge> DirectedGraph::cross_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : edges_) {
    if (e.from != e.to) out.push_back(e);
  }
  return out;
}

bool DirectedGraph::has_edge(int from, int to) const {
  check_node(from);
  check_node(to);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

void DirectedGraph::check_node(int i) const {
  if (i < 1 || i > n_) {
    throw InvalidArgument(fmt::format("agent index {} outside 1..{}", i, n_));
  }
}

const std::vector<int>& DirectedGraph::in_neighbors(int i) const {
  check_node(i);
  return in_[i - 1];
}

const std::vector<int>& DirectedGraph::out_neighbors(int i) const {
  check_node(i);
  return out_[i - 1];
}

bool DirectedGraph::is_strongly_connected() const {
  // Every node reaches node 1 and node 1 reaches every node.
  auto fwd = reachable_from(0, out_);
  auto bwd = reachable_from(0, in_);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

DirectedGraph DirectedGraph::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) {
    throw InvalidArgument("permutation length does not match graph size");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  for (int v : perm) {
    if (v < 1 || v > n_ || seen[static_cast<std::size_t>(v - 1)]) {
      throw InvalidArgument("not a permutation of 1..n");
    }
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const Edge& e : edges_) {
    edges.push_back({perm[e.from - 1], perm[e.to - 1]});
  }
  return from_edges(n_, edges);
}

DirectedGraph four_agent_graph() {
  return DirectedGraph::from_edges(
      4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {1, 3}, {4, 2}});
}

}  // namespace rgfdgd
