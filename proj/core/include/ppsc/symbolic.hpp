#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppsc/graph.hpp"
#include "ppsc/matrix.hpp"

namespace ppsc::symbolic {

using netgraph::DirectedEdge;
using netgraph::Graph;
using netgraph::OrientedTree;

using IntMatrix = std::vector<std::vector<int>>;

numerics::Matrix to_matrix(const IntMatrix& m);

// Exact per-node linear forms: row i of (beta_coeff | noise_coeff) encodes
//   x_i(t) = sum_j beta_coeff[i][j] * beta_j + sum_s noise_coeff[i][s] * gamma_{s+1}
// with beta coefficients in {0,1} and noise coefficients in {-1,0,1}.
struct SymbolicState {
  int n = 0;
  int steps = 0;
  bool tree_run = false;
  IntMatrix beta_coeff;   // n x n
  IntMatrix noise_coeff;  // n x steps
  std::vector<DirectedEdge> edge_sequence;
};

// Runs the n-1 deterministic gossip steps of an oriented spanning tree.
// Internal invariants are checked after every step and violations throw
// std::logic_error (they must never fire).
SymbolicState run_symbolic(const OrientedTree& t);

// General run over an arbitrary directed edge sequence of the graph (edges
// may repeat; T need not be n-1). Tree-only invariants are skipped.
SymbolicState run_symbolic_sequence(const Graph& g, const std::vector<DirectedEdge>& seq);

// beta_sharp = C beta + D gamma for the full run.
struct MechanismMatrices {
  IntMatrix c;  // n x n, entries in {0,1}
  IntMatrix d;  // n x steps, entries in {-1,0,1}
  numerics::Matrix c_matrix() const { return to_matrix(c); }
  numerics::Matrix d_matrix() const { return to_matrix(d); }
};

// Reads C and D off the symbolic state and cross-checks them against the
// step-matrix products they must equal; a mismatch throws std::logic_error.
MechanismMatrices extract_matrices(const SymbolicState& s);

struct DependenceResult {
  bool dependent = false;
  // 1-based index of the unique shared noise symbol when dependent.
  std::optional<int> shared_noise;
};

// Ground truth for output dependence: rows i and j share a noise column with
// coefficient product -1. For tree runs the shared column is unique and the
// oracle asserts that.
DependenceResult dependence_oracle(const SymbolicState& s, int i, int j);

// Dependence predicate for node pairs *not* joined by a directed tree path:
// evaluates the pivot/order/out-edge-timing conditions over all candidate
// pivots on the undirected path. Throws std::invalid_argument when a
// directed path exists (use chain_dependence_predicate).
bool pivot_dependence_predicate(const OrientedTree& t, int i, int j);

// Dependence predicate for node pairs joined by a directed tree path i -> j
// (in either direction). Throws std::invalid_argument when no directed path
// exists.
bool chain_dependence_predicate(const OrientedTree& t, int i, int j);

// True iff the tree path from i to j is consistently oriented one way.
bool directed_path_exists(const OrientedTree& t, int i, int j);

// Covariance structure of the output: Sigma = sigma2 * L with L = D D^T an
// integer tree Laplacian.
struct GraphicalModel {
  double sigma2 = 0.0;
  IntMatrix laplacian;
  std::vector<netgraph::Edge> edges;  // pairs with L_ij == -1
};

GraphicalModel graphical_model(const SymbolicState& s, double sigma2);

// Debug dump, one line per node, e.g. `x4 = b2+b3+b4+b5 -g1 -g2 -g4`.
std::string format_state(const SymbolicState& s);

}  // namespace ppsc::symbolic
