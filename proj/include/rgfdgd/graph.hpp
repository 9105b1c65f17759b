#pragma once

#include <utility>
#include <vector>

namespace rgfdgd {

/// Ordered pair (from, to) with 1-based agent indices: information flows
/// from `from` to `to`.
struct Edge {
  int from;
  int to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed communication graph over agents 1..n. Every node carries a
/// self-loop. Immutable after construction.
///
/// The public API speaks 1-based indices; storage is 0-based.
class DirectedGraph {
 public:
  /// Builds a graph from an edge list, adding missing self-loops and
  /// collapsing duplicates. Throws InvalidArgument naming the first
  /// out-of-range pair.
  static DirectedGraph from_edges(int n, const std::vector<Edge>& edges);

  /// Directed cycle 1 -> 2 -> ... -> n -> 1 plus self-loops. Requires n >= 2.
  static DirectedGraph ring(int n);

  int size() const { return n_; }

  /// Sorted edge list including self-loops.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Edges excluding self-loops, in sorted order.
  std::vector<Edge> cross_edges() const;

  bool has_edge(int from, int to) const;

  /// {j | (j, i) in E}, sorted, always contains i.
  const std::vector<int>& in_neighbors(int i) const;
  /// {j | (i, j) in E}, sorted, always contains i.
  const std::vector<int>& out_neighbors(int i) const;

  bool is_strongly_connected() const;

  /// Relabels node i as perm[i-1] (perm is a permutation of 1..n).
  DirectedGraph permuted(const std::vector<int>& perm) const;

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  DirectedGraph(int n, std::vector<Edge> edges);
  void check_node(int i) const;

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

/// Four-agent directed topology used by the polynomial and logistic
/// experiments: 1->2, 2->3, 3->4, 4->1, 1->3, 4->2.
DirectedGraph four_agent_graph();

}  // namespace rgfdgd
