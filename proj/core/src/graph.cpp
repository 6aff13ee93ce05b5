#include "ppsc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ppsc/rng.hpp"

namespace ppsc::netgraph {

Edge make_edge(int i, int j) {
  if (i == j) throw std::invalid_argument("self-loop edge {" + std::to_string(i) + "}");
  return Edge{std::min(i, j), std::max(i, j)};
}

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n <= 0) throw std::invalid_argument("graph needs at least one node");
  std::set<Edge> seen;
  for (const Edge& e : edges) {
    Edge canon = make_edge(e.a, e.b);
    if (canon.a < 1 || canon.b > n_) {
      throw std::invalid_argument("edge {" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                  "} outside node range 1.." + std::to_string(n_));
    }
    if (!seen.insert(canon).second) {
      throw std::invalid_argument("duplicate edge {" + std::to_string(canon.a) + "," +
                                  std::to_string(canon.b) + "}");
    }
  }
  edges_.assign(seen.begin(), seen.end());
  adj_.assign(static_cast<std::size_t>(n_) + 1, {});
  for (const Edge& e : edges_) {
    adj_[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj_[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

void Graph::check_node(int node) const {
  if (node < 1 || node > n_) {
    throw std::invalid_argument("node " + std::to_string(node) + " outside 1.." +
                                std::to_string(n_));
  }
}

const std::vector<int>& Graph::neighbors(int node) const {
  check_node(node);
  return adj_[static_cast<std::size_t>(node)];
}

bool Graph::has_edge(int i, int j) const {
  check_node(i);
  check_node(j);
  const auto& nbrs = adj_[static_cast<std::size_t>(i)];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

int Graph::first_unreachable() const {
  std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
  std::vector<int> stack{1};
  seen[1] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj_[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
  }
  for (int v = 1; v <= n_; ++v) {
    if (!seen[static_cast<std::size_t>(v)]) return v;
  }
  return 0;
}

bool Graph::connected() const { return first_unreachable() == 0; }

Graph Graph::parse(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<Edge> edges;
  std::string extra;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    if (n < 0) {
      if (!(ls >> n)) continue;  // blank/comment before header
      if (n <= 0) {
        throw std::runtime_error(source + ":" + std::to_string(lineno) +
                                 ": node count must be positive");
      }
      if (ls >> extra) {
        throw std::runtime_error(source + ":" + std::to_string(lineno) +
                                 ": node-count line must hold a single number");
      }
      continue;
    }
    int i = 0, j = 0;
    if (!(ls >> i)) continue;
    if (!(ls >> j) || (ls >> extra)) {
      throw std::runtime_error(source + ":" + std::to_string(lineno) + ": expected `i j` edge");
    }
    edges.push_back(Edge{i, j});
  }
  if (n < 0) throw std::runtime_error(source + ": missing node-count header");
  try {
    return Graph(n, std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(source + ": " + e.what());
  }
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return parse(in, path);
}

Graph Graph::path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.push_back(Edge{i, i + 1});
  return Graph(n, std::move(edges));
}

Graph Graph::ring_graph(int n) {
  if (n < 3) throw std::invalid_argument("ring needs at least 3 nodes");
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.push_back(Edge{i, i + 1});
  edges.push_back(Edge{n, 1});
  return Graph(n, std::move(edges));
}

Graph Graph::complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) edges.push_back(Edge{i, j});
  }
  return Graph(n, std::move(edges));
}

OrientedTree::OrientedTree(const Graph& base, std::vector<DirectedEdge> directed_edges)
    : n_(base.node_count()), seq_(std::move(directed_edges)) {
  if (static_cast<int>(seq_.size()) != n_ - 1) {
    throw std::invalid_argument("oriented tree needs exactly n-1 directed edges");
  }
  adj_.assign(static_cast<std::size_t>(n_) + 1, {});
  order_.assign(static_cast<std::size_t>(n_) + 1, std::vector<int>(n_ + 1, 0));
  dir_.assign(static_cast<std::size_t>(n_) + 1, std::vector<int8_t>(n_ + 1, 0));
  int k = 0;
  for (const DirectedEdge& e : seq_) {
    ++k;
    if (!base.has_edge(e.tail, e.head)) {
      throw std::invalid_argument("tree edge (" + std::to_string(e.tail) + "," +
                                  std::to_string(e.head) + ") not in base graph");
    }
    if (order_[e.tail][e.head] != 0) {
      throw std::invalid_argument("tree edge {" + std::to_string(e.tail) + "," +
                                  std::to_string(e.head) + "} repeated in selection order");
    }
    order_[e.tail][e.head] = order_[e.head][e.tail] = k;
    dir_[e.tail][e.head] = 1;
    adj_[e.tail].push_back(e.head);
    adj_[e.head].push_back(e.tail);
  }
  // n-1 distinct edges: acyclic iff connected.
  std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
  std::vector<int> stack{1};
  seen[1] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj_[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  if (count != n_) throw std::invalid_argument("directed edges do not span the graph");
}

int OrientedTree::order_of(int i, int j) const {
  int k = order_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
  if (k == 0) {
    throw std::invalid_argument("{" + std::to_string(i) + "," + std::to_string(j) +
                                "} is not a tree edge");
  }
  return k;
}

bool OrientedTree::has_directed_edge(int tail, int head) const {
  return dir_.at(static_cast<std::size_t>(tail)).at(static_cast<std::size_t>(head)) != 0;
}

std::vector<int> OrientedTree::out_edge_orders(int tail) const {
  std::vector<int> out;
  for (int head : tree_neighbors(tail)) {
    if (has_directed_edge(tail, head)) out.push_back(order_of(tail, head));
  }
  return out;
}

const std::vector<int>& OrientedTree::tree_neighbors(int node) const {
  if (node < 1 || node > n_) {
    throw std::invalid_argument("node " + std::to_string(node) + " outside 1.." +
                                std::to_string(n_));
  }
  return adj_[static_cast<std::size_t>(node)];
}

std::vector<int> OrientedTree::path(int i, int j) const {
  if (i == j) throw std::invalid_argument("path endpoints must differ");
  tree_neighbors(i);
  tree_neighbors(j);
  std::vector<int> parent(static_cast<std::size_t>(n_) + 1, 0);
  std::vector<int> stack{i};
  parent[static_cast<std::size_t>(i)] = i;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (u == j) break;
    for (int v : adj_[static_cast<std::size_t>(u)]) {
      if (parent[static_cast<std::size_t>(v)] == 0) {
        parent[static_cast<std::size_t>(v)] = u;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> rev;
  for (int v = j; v != i; v = parent[static_cast<std::size_t>(v)]) rev.push_back(v);
  rev.push_back(i);
  return {rev.rbegin(), rev.rend()};
}

OrientedTree spanning_tree(const Graph& g, std::uint64_t seed) {
  if (int u = g.first_unreachable(); u != 0) {
    throw std::invalid_argument("graph is disconnected: node " + std::to_string(u) +
                                " unreachable from node 1");
  }
  SplitRng rng(seed);
  const int n = g.node_count();

  // DFS over adjacency lists shuffled under the seed.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (int v = 1; v <= n; ++v) {
    adj[static_cast<std::size_t>(v)] = g.neighbors(v);
    rng.shuffle(adj[static_cast<std::size_t>(v)]);
  }
  int root = static_cast<int>(rng.below(static_cast<std::uint64_t>(n))) + 1;
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Edge> tree_edges;
  std::vector<int> stack{root};
  seen[static_cast<std::size_t>(root)] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        tree_edges.push_back(make_edge(u, v));
        stack.push_back(v);
      }
    }
  }

  std::vector<DirectedEdge> seq;
  seq.reserve(tree_edges.size());
  for (const Edge& e : tree_edges) {
    // Fair coin per edge.
    seq.push_back(rng.below(2) == 0 ? DirectedEdge{e.a, e.b} : DirectedEdge{e.b, e.a});
  }
  rng.shuffle(seq);  // uniform total order
  return OrientedTree(g, std::move(seq));
}

std::vector<int> undirected_path(const OrientedTree& t, int i, int j) { return t.path(i, j); }

IndependentPartition greedy_independent_partition(const Graph& g) {
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("partition needs at least 2 nodes");
  std::vector<int> color(static_cast<std::size_t>(n) + 1, -1);
  int num_colors = 0;
  for (int v = 1; v <= n; ++v) {
    std::vector<char> used(static_cast<std::size_t>(num_colors) + 1, 0);
    for (int u : g.neighbors(v)) {
      if (u < v) used[static_cast<std::size_t>(color[static_cast<std::size_t>(u)])] = 1;
    }
    int c = 0;
    while (c < num_colors && used[static_cast<std::size_t>(c)]) ++c;
    color[static_cast<std::size_t>(v)] = c;
    num_colors = std::max(num_colors, c + 1);
  }
  IndependentPartition part;
  part.blocks.assign(static_cast<std::size_t>(num_colors), {});
  for (int v = 1; v <= n; ++v) {
    part.blocks[static_cast<std::size_t>(color[static_cast<std::size_t>(v)])].push_back(v);
  }
  for (const auto& block : part.blocks) part.representatives.push_back(block.front());
  return part;
}

bool partition_valid(const Graph& g, const IndependentPartition& p) {
  const int n = g.node_count();
  if (p.blocks.size() != p.representatives.size() || p.blocks.empty()) return false;
  std::vector<char> covered(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& block = p.blocks[b];
    if (block.empty()) return false;
    bool rep_found = false;
    for (int v : block) {
      if (v < 1 || v > n || covered[static_cast<std::size_t>(v)]) return false;
      covered[static_cast<std::size_t>(v)] = 1;
      if (v == p.representatives[b]) rep_found = true;
    }
    if (!rep_found) return false;
    for (std::size_t x = 0; x < block.size(); ++x) {
      for (std::size_t y = x + 1; y < block.size(); ++y) {
        if (g.has_edge(block[x], block[y])) return false;
      }
    }
  }
  for (int v = 1; v <= n; ++v) {
    if (!covered[static_cast<std::size_t>(v)]) return false;
  }
  return true;
}

int max_degree(const Graph& g) {
  int d = 0;
  for (int v = 1; v <= g.node_count(); ++v) d = std::max(d, g.degree(v));
  return d;
}

}  // namespace ppsc::netgraph
