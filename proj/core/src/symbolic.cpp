#include "ppsc/symbolic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ppsc::symbolic {
namespace {

void validate_state(const SymbolicState& s, int injected_steps) {
  // Beta columns: every beta_j lives in exactly one row with coefficient 1.
  for (int j = 0; j < s.n; ++j) {
    int col_sum = 0;
    for (int i = 0; i < s.n; ++i) {
      const int c = s.beta_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (c != 0 && c != 1) throw std::logic_error("symbolic: beta coefficient outside {0,1}");
      col_sum += c;
    }
    if (col_sum != 1) throw std::logic_error("symbolic: beta column sum != 1");
  }
  // Noise columns: one +1 and one -1 in distinct rows; for non-tree runs a
  // column may also have annihilated to all zeros.
  for (int j = 0; j < injected_steps; ++j) {
    int plus = 0, minus = 0;
    for (int i = 0; i < s.n; ++i) {
      const int d = s.noise_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (d == 1) {
        ++plus;
      } else if (d == -1) {
        ++minus;
      } else if (d != 0) {
        throw std::logic_error("symbolic: noise coefficient outside {-1,0,1}");
      }
    }
    const bool paired = plus == 1 && minus == 1;
    const bool vanished = plus == 0 && minus == 0;
    if (s.tree_run ? !paired : !(paired || vanished)) {
      throw std::logic_error("symbolic: noise column lost its +1/-1 pair");
    }
  }
}

SymbolicState run_impl(int n, const std::vector<DirectedEdge>& seq, bool tree_run) {
  SymbolicState s;
  s.n = n;
  s.steps = static_cast<int>(seq.size());
  s.tree_run = tree_run;
  s.edge_sequence = seq;
  s.beta_coeff.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  s.noise_coeff.assign(static_cast<std::size_t>(n),
                       std::vector<int>(static_cast<std::size_t>(s.steps), 0));
  for (int i = 0; i < n; ++i) s.beta_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;

  for (int t = 0; t < s.steps; ++t) {
    const auto tail = static_cast<std::size_t>(seq[static_cast<std::size_t>(t)].tail - 1);
    const auto head = static_cast<std::size_t>(seq[static_cast<std::size_t>(t)].head - 1);
    if (tail == head || seq[static_cast<std::size_t>(t)].tail < 1 ||
        seq[static_cast<std::size_t>(t)].head < 1 || seq[static_cast<std::size_t>(t)].tail > n ||
        seq[static_cast<std::size_t>(t)].head > n) {
      throw std::invalid_argument("symbolic: malformed directed edge in sequence");
    }
    auto& bc = s.beta_coeff;
    auto& nc = s.noise_coeff;
    // Head absorbs the tail's whole linear form, tail becomes the fresh symbol.
    for (int j = 0; j < n; ++j) {
      bc[head][static_cast<std::size_t>(j)] += bc[tail][static_cast<std::size_t>(j)];
      bc[tail][static_cast<std::size_t>(j)] = 0;
    }
    for (int j = 0; j < t; ++j) {
      nc[head][static_cast<std::size_t>(j)] += nc[tail][static_cast<std::size_t>(j)];
      nc[tail][static_cast<std::size_t>(j)] = 0;
    }
    nc[tail][static_cast<std::size_t>(t)] = 1;
    nc[head][static_cast<std::size_t>(t)] = -1;

    validate_state(s, t + 1);
  }
  return s;
}

std::vector<int> off_path_out_orders(const OrientedTree& t, const std::vector<int>& path,
                                     std::size_t b) {
  std::vector<int> orders;
  const int node = path[b];
  for (int nb : t.tree_neighbors(node)) {
    if (b > 0 && nb == path[b - 1]) continue;
    if (b + 1 < path.size() && nb == path[b + 1]) continue;
    if (t.has_directed_edge(node, nb)) orders.push_back(t.order_of(node, nb));
  }
  return orders;
}

}  // namespace

numerics::Matrix to_matrix(const IntMatrix& m) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(m.front().size());
  numerics::Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out(i, j) = static_cast<double>(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

SymbolicState run_symbolic(const OrientedTree& t) {
  return run_impl(t.node_count(), t.directed_edges(), true);
}

SymbolicState run_symbolic_sequence(const Graph& g, const std::vector<DirectedEdge>& seq) {
  for (const DirectedEdge& e : seq) {
    if (!g.has_edge(e.tail, e.head)) {
      throw std::invalid_argument("edge (" + std::to_string(e.tail) + "," +
                                  std::to_string(e.head) + ") not in graph");
    }
  }
  return run_impl(g.node_count(), seq, false);
}

MechanismMatrices extract_matrices(const SymbolicState& s) {
  if (s.tree_run && s.steps != s.n - 1) {
    throw std::invalid_argument("extract_matrices: tree run not fully executed");
  }
  MechanismMatrices mm{s.beta_coeff, s.noise_coeff};

  // Product-form cross-check: C = A_T...A_1 and D_k = A_T...A_{k+1} v_k, built
  // by sweeping k = T..1 while folding A_k into the running left product M.
  // Folding M <- M A_k only rewrites column tail_k to M[:,head_k], and
  // M v_k = M[:,tail_k] - M[:,head_k].
  const int n = s.n;
  IntMatrix m(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  IntMatrix d_check(static_cast<std::size_t>(n),
                    std::vector<int>(static_cast<std::size_t>(s.steps), 0));
  for (int k = s.steps - 1; k >= 0; --k) {
    const auto tail = static_cast<std::size_t>(s.edge_sequence[static_cast<std::size_t>(k)].tail - 1);
    const auto head = static_cast<std::size_t>(s.edge_sequence[static_cast<std::size_t>(k)].head - 1);
    for (int i = 0; i < n; ++i) {
      d_check[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          m[static_cast<std::size_t>(i)][tail] - m[static_cast<std::size_t>(i)][head];
    }
    for (int i = 0; i < n; ++i) {
      m[static_cast<std::size_t>(i)][tail] = m[static_cast<std::size_t>(i)][head];
    }
  }
  if (m != mm.c || d_check != mm.d) {
    throw std::logic_error("extract_matrices: symbolic state disagrees with product form");
  }
  return mm;
}

DependenceResult dependence_oracle(const SymbolicState& s, int i, int j) {
  if (i == j || i < 1 || j < 1 || i > s.n || j > s.n) {
    throw std::invalid_argument("dependence_oracle: invalid node pair");
  }
  const auto& ri = s.noise_coeff[static_cast<std::size_t>(i - 1)];
  const auto& rj = s.noise_coeff[static_cast<std::size_t>(j - 1)];
  DependenceResult res;
  int shared = 0;
  for (int t = 0; t < s.steps; ++t) {
    if (ri[static_cast<std::size_t>(t)] * rj[static_cast<std::size_t>(t)] == -1) {
      ++shared;
      if (!res.shared_noise) res.shared_noise = t + 1;
    }
  }
  res.dependent = shared > 0;
  if (s.tree_run && shared > 1) {
    throw std::logic_error("dependence_oracle: shared noise symbol not unique on a tree run");
  }
  return res;
}

bool directed_path_exists(const OrientedTree& t, int i, int j) {
  const std::vector<int> p = t.path(i, j);
  bool fwd = true, bwd = true;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (!t.has_directed_edge(p[k], p[k + 1])) fwd = false;
    if (!t.has_directed_edge(p[k + 1], p[k])) bwd = false;
  }
  return fwd || bwd;
}

bool pivot_dependence_predicate(const OrientedTree& t, int i, int j) {
  if (directed_path_exists(t, i, j)) {
    throw std::invalid_argument("pivot_dependence_predicate: directed path exists, use chain_dependence_predicate");
  }
  const std::vector<int> p = t.path(i, j);
  const std::size_t l = p.size() - 1;

  for (std::size_t pivot = 1; pivot < l; ++pivot) {
    // (i) both sides of the pivot are directed paths away from it.
    bool ok = true;
    for (std::size_t k = pivot; ok && k >= 1; --k) {
      if (!t.has_directed_edge(p[k], p[k - 1])) ok = false;
    }
    for (std::size_t k = pivot; ok && k + 1 <= l; ++k) {
      if (!t.has_directed_edge(p[k], p[k + 1])) ok = false;
    }
    if (!ok) continue;

    // (ii) selection order increases outward along both sides.
    for (std::size_t k = pivot; ok && k >= 2; --k) {
      if (!(t.order_of(p[k], p[k - 1]) < t.order_of(p[k - 1], p[k - 2]))) ok = false;
    }
    for (std::size_t k = pivot; ok && k + 2 <= l; ++k) {
      if (!(t.order_of(p[k], p[k + 1]) < t.order_of(p[k + 1], p[k + 2]))) ok = false;
    }
    if (!ok) continue;

    // (iii) out-edges leaving the path never intercept the transfer.
    const int ord_first = t.order_of(p[0], p[1]);
    for (int o : off_path_out_orders(t, p, 0)) {
      if (!(o < ord_first)) ok = false;
    }
    for (std::size_t b = 1; ok && b < pivot; ++b) {
      const int toward_pivot = t.order_of(p[b], p[b + 1]);
      const int away = t.order_of(p[b], p[b - 1]);
      for (int o : off_path_out_orders(t, p, b)) {
        if (!(o < toward_pivot || away <= o)) ok = false;
      }
    }
    if (ok) {
      const int left = t.order_of(p[pivot], p[pivot - 1]);
      const int right = t.order_of(p[pivot], p[pivot + 1]);
      for (int o : off_path_out_orders(t, p, pivot)) {
        if (!(o < std::min(left, right) || std::max(left, right) <= o)) ok = false;
      }
    }
    for (std::size_t b = pivot + 1; ok && b < l; ++b) {
      const int toward_pivot = t.order_of(p[b - 1], p[b]);
      const int away = t.order_of(p[b], p[b + 1]);
      for (int o : off_path_out_orders(t, p, b)) {
        if (!(o < toward_pivot || away <= o)) ok = false;
      }
    }
    if (ok) {
      const int ord_last = t.order_of(p[l - 1], p[l]);
      for (int o : off_path_out_orders(t, p, l)) {
        if (!(o < ord_last)) ok = false;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool chain_dependence_predicate(const OrientedTree& t, int i, int j) {
  std::vector<int> p = t.path(i, j);
  bool fwd = true;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (!t.has_directed_edge(p[k], p[k + 1])) {
      fwd = false;
      break;
    }
  }
  if (!fwd) {
    std::reverse(p.begin(), p.end());
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      if (!t.has_directed_edge(p[k], p[k + 1])) {
        throw std::invalid_argument("chain_dependence_predicate: no directed path between nodes");
      }
    }
  }
  const std::size_t l = p.size() - 1;

  // (i) edges fire in path order.
  for (std::size_t k = 0; k + 2 <= l; ++k) {
    if (!(t.order_of(p[k], p[k + 1]) < t.order_of(p[k + 1], p[k + 2]))) return false;
  }
  // (ii) out-edge timing along the path.
  const int ord_first = t.order_of(p[0], p[1]);
  for (int o : off_path_out_orders(t, p, 0)) {
    if (!(o < ord_first)) return false;
  }
  for (std::size_t b = 1; b < l; ++b) {
    const int incoming = t.order_of(p[b - 1], p[b]);
    const int outgoing = t.order_of(p[b], p[b + 1]);
    for (int o : off_path_out_orders(t, p, b)) {
      if (!(o < incoming || outgoing < o)) return false;
    }
  }
  const int ord_last = t.order_of(p[l - 1], p[l]);
  for (int o : off_path_out_orders(t, p, l)) {
    if (!(o < ord_last)) return false;
  }
  return true;
}

GraphicalModel graphical_model(const SymbolicState& s, double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("graphical_model: sigma2 must be positive");
  if (!s.tree_run || s.steps != s.n - 1) {
    throw std::invalid_argument("graphical_model: needs a fully executed spanning-tree run");
  }
  const int n = s.n;
  GraphicalModel gm;
  gm.sigma2 = sigma2;
  gm.laplacian.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int acc = 0;
      for (int k = 0; k < s.steps; ++k) {
        acc += s.noise_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
               s.noise_coeff[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      }
      gm.laplacian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
    }
  }
  // Tree-Laplacian structure checks; violations are internal-consistency errors.
  std::vector<netgraph::Edge> edges;
  for (int i = 0; i < n; ++i) {
    int row_sum = 0;
    for (int j = 0; j < n; ++j) {
      const int lij = gm.laplacian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      row_sum += lij;
      if (i != j) {
        if (lij != 0 && lij != -1) {
          throw std::logic_error("graphical_model: off-diagonal entry outside {0,-1}");
        }
        if (i < j && lij == -1) edges.push_back(netgraph::Edge{i + 1, j + 1});
      }
    }
    if (row_sum != 0) throw std::logic_error("graphical_model: nonzero Laplacian row sum");
  }
  if (static_cast<int>(edges.size()) != n - 1) {
    throw std::logic_error("graphical_model: dependent-pair graph is not a tree (edge count)");
  }
  try {
    Graph support(n, edges);
    if (!support.connected()) {
      throw std::logic_error("graphical_model: dependent-pair graph is disconnected");
    }
  } catch (const std::invalid_argument&) {
    throw std::logic_error("graphical_model: dependent-pair graph malformed");
  }
  gm.edges = std::move(edges);
  return gm;
}

std::string format_state(const SymbolicState& s) {
  std::ostringstream out;
  for (int i = 0; i < s.n; ++i) {
    out << 'x' << (i + 1) << " = ";
    bool any = false;
    for (int j = 0; j < s.n; ++j) {
      if (s.beta_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 1) {
        if (any) out << '+';
        out << 'b' << (j + 1);
        any = true;
      }
    }
    for (int k = 0; k < s.steps; ++k) {
      const int d = s.noise_coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (d == 0) continue;
      if (any) out << ' ';
      out << (d > 0 ? '+' : '-') << 'g' << (k + 1);
      any = true;
    }
    if (!any) out << '0';
    out << '\n';
  }
  return out.str();
}

}  // namespace ppsc::symbolic
