#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ppsc::netgraph {

// Undirected edge as an unordered pair; stored with min endpoint first.
struct Edge {
  int a;
  int b;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

Edge make_edge(int i, int j);

// Directed tree edge (tail -> head).
struct DirectedEdge {
  int tail;
  int head;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// Simple undirected graph on nodes 1..n. Immutable after construction.
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int node) const;
  bool has_edge(int i, int j) const;
  int degree(int node) const { return static_cast<int>(neighbors(node).size()); }
  bool connected() const;
  // Smallest node unreachable from node 1, or 0 when connected.
  int first_unreachable() const;

  // Text format: first line `n`, then one `i j` per line, 1-indexed,
  // `#` starts a comment. `source` is used in error messages.
  static Graph parse(std::istream& in, const std::string& source);
  static Graph load(const std::string& path);

  static Graph path_graph(int n);
  static Graph ring_graph(int n);
  static Graph complete_graph(int n);

 private:
  void check_node(int node) const;

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;  // adj_[0] unused
};

// Spanning tree of a graph with per-edge orientation and a total selection
// order: directed_edges()[k] is the edge fired at step k+1.
class OrientedTree {
 public:
  OrientedTree(const Graph& base, std::vector<DirectedEdge> directed_edges);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(seq_.size()); }
  const std::vector<DirectedEdge>& directed_edges() const { return seq_; }
  const DirectedEdge& edge(int k) const { return seq_.at(static_cast<std::size_t>(k)); }

  // 1-based position of the tree edge {i,j} in the selection order.
  int order_of(int i, int j) const;
  bool has_directed_edge(int tail, int head) const;
  // Order positions of all directed edges with the given tail.
  std::vector<int> out_edge_orders(int tail) const;
  const std::vector<int>& tree_neighbors(int node) const;

  // Unique tree path between two distinct nodes, endpoints included.
  std::vector<int> path(int i, int j) const;

 private:
  int n_;
  std::vector<DirectedEdge> seq_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> order_;   // order_[a][b]: 1-based order of {a,b}, 0 if absent
  std::vector<std::vector<int8_t>> dir_;  // dir_[a][b]: 1 if (a,b) directed a->b
};

// Disjoint independent vertex sets covering V, one representative per block.
struct IndependentPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> representatives;
};

// Randomized spanning tree: adjacency shuffled under the seed, then DFS from
// a random root; each edge oriented by a fair coin and the selection order is
// a uniform shuffle. Deterministic given the seed. Throws on a disconnected
// graph, naming an unreachable node.
OrientedTree spanning_tree(const Graph& g, std::uint64_t seed);

// Tree path between i and j (wrapper over OrientedTree::path).
std::vector<int> undirected_path(const OrientedTree& t, int i, int j);

// Greedy coloring in ascending node order; blocks are the color classes and
// each representative is the lowest-index node of its block.
IndependentPartition greedy_independent_partition(const Graph& g);

// Brute-force check that every block is an independent set, blocks are
// disjoint, cover V, and representatives belong to their block.
bool partition_valid(const Graph& g, const IndependentPartition& p);

int max_degree(const Graph& g);

}  // namespace ppsc::netgraph
