#include <doctest.h>

#include <sstream>

#include "ppsc/rng.hpp"
#include "ppsc/symbolic.hpp"
#include "ppsc/verify.hpp"

using namespace ppsc;
using netgraph::DirectedEdge;
using netgraph::Edge;
using netgraph::Graph;
using netgraph::OrientedTree;
using symbolic::SymbolicState;

namespace {

OrientedTree random_tree(int n, SplitRng& rng) {
  // Random tree through a random attachment sequence, then random
  // orientation and selection order.
  std::vector<Edge> edges;
  for (int v = 2; v <= n; ++v) {
    edges.push_back(netgraph::make_edge(v, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(v - 1)))));
  }
  std::vector<DirectedEdge> seq;
  for (const Edge& e : edges) {
    seq.push_back(rng.below(2) == 0 ? DirectedEdge{e.a, e.b} : DirectedEdge{e.b, e.a});
  }
  rng.shuffle(seq);
  return OrientedTree(Graph(n, edges), seq);
}

}  // namespace

TEST_CASE("worked-example run is exact") {
  const SymbolicState s = symbolic::run_symbolic(verify::demo5_tree());
  const symbolic::IntMatrix beta = {{1, 0, 0, 0, 0},
                                    {0, 0, 0, 0, 0},
                                    {0, 0, 0, 0, 0},
                                    {0, 1, 1, 1, 1},
                                    {0, 0, 0, 0, 0}};
  const symbolic::IntMatrix noise = {{0, 1, -1, 0},
                                     {0, 0, 1, 0},
                                     {0, 0, 0, 1},
                                     {-1, -1, 0, -1},
                                     {1, 0, 0, 0}};
  CHECK(s.beta_coeff == beta);
  CHECK(s.noise_coeff == noise);

  const std::string dump = symbolic::format_state(s);
  CHECK(dump.find("x4 = b2+b3+b4+b5 -g1 -g2 -g4") != std::string::npos);
  CHECK(dump.find("x1 = b1 +g2 -g3") != std::string::npos);
  CHECK(dump.find("x5 = +g1") != std::string::npos);
}

TEST_CASE("two-node mechanism") {
  const Graph g = Graph::path_graph(2);
  const OrientedTree t(g, {{1, 2}});
  const SymbolicState s = symbolic::run_symbolic(t);
  const auto mm = symbolic::extract_matrices(s);
  CHECK(mm.c == symbolic::IntMatrix{{0, 0}, {1, 1}});
  CHECK(mm.d == symbolic::IntMatrix{{1}, {-1}});
  const auto gm = symbolic::graphical_model(s, 1.0);
  CHECK(gm.laplacian == symbolic::IntMatrix{{1, -1}, {-1, 1}});
}

TEST_CASE("invariants hold across random trees") {
  SplitRng rng(101);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const OrientedTree t = random_tree(n, rng);
    // run_symbolic validates the column invariants after every step and
    // extract_matrices cross-checks the product form; both throw on failure.
    const SymbolicState s = symbolic::run_symbolic(t);
    CHECK_NOTHROW(symbolic::extract_matrices(s));
  }
}

TEST_CASE("general edge sequences allow noise cancellation") {
  const Graph g = Graph::path_graph(2);
  const std::vector<DirectedEdge> seq = {{1, 2}, {1, 2}};
  const SymbolicState s = symbolic::run_symbolic_sequence(g, seq);
  // gamma_1 annihilated when the tail row moved onto the head holding -gamma_1.
  CHECK(s.noise_coeff == symbolic::IntMatrix{{0, 1}, {0, -1}});
  CHECK(s.beta_coeff == symbolic::IntMatrix{{0, 0}, {1, 1}});
  CHECK_NOTHROW(symbolic::extract_matrices(s));

  CHECK_THROWS_AS(symbolic::run_symbolic_sequence(g, {{2, 1}, {1, 3}}), std::invalid_argument);
}

TEST_CASE("dependence oracle on the worked example") {
  const SymbolicState s = symbolic::run_symbolic(verify::demo5_tree());
  const auto dep14 = symbolic::dependence_oracle(s, 1, 4);
  CHECK(dep14.dependent);
  CHECK(dep14.shared_noise == 2);
  CHECK_FALSE(symbolic::dependence_oracle(s, 2, 3).dependent);
  CHECK(symbolic::dependence_oracle(s, 4, 5).dependent);
}

TEST_CASE("dependence predicates on the worked example") {
  const OrientedTree t = verify::demo5_tree();
  CHECK_FALSE(symbolic::directed_path_exists(t, 1, 4));
  CHECK(symbolic::pivot_dependence_predicate(t, 1, 4));
  CHECK(symbolic::directed_path_exists(t, 5, 4));
  CHECK(symbolic::chain_dependence_predicate(t, 5, 4));
  CHECK_THROWS_AS(symbolic::pivot_dependence_predicate(t, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(symbolic::chain_dependence_predicate(t, 1, 4), std::invalid_argument);
}

TEST_CASE("hub out-edge timing blocks dependence") {
  // Star with every edge leaving the hub; the middle out-edge interrupts the
  // transfer between the other two leaves.
  const Graph star(4, {{1, 2}, {1, 3}, {1, 4}});
  const OrientedTree t(star, {{1, 2}, {1, 3}, {1, 4}});
  const SymbolicState s = symbolic::run_symbolic(t);
  CHECK_FALSE(symbolic::pivot_dependence_predicate(t, 2, 4));
  CHECK_FALSE(symbolic::dependence_oracle(s, 2, 4).dependent);
  CHECK(symbolic::pivot_dependence_predicate(t, 2, 3));
  CHECK(symbolic::dependence_oracle(s, 2, 3).dependent);
}

TEST_CASE("reversed selection order breaks a directed chain") {
  const Graph path3 = Graph::path_graph(3);
  const OrientedTree forward(path3, {{1, 2}, {2, 3}});
  CHECK(symbolic::chain_dependence_predicate(forward, 1, 3));
  const OrientedTree reversed(path3, {{2, 3}, {1, 2}});
  CHECK_FALSE(symbolic::chain_dependence_predicate(reversed, 1, 3));
  CHECK_FALSE(symbolic::dependence_oracle(symbolic::run_symbolic(reversed), 1, 3).dependent);
}

TEST_CASE("predicates match the oracle on random trees") {
  SplitRng rng(202);
  for (int rep = 0; rep < 400; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const OrientedTree t = random_tree(n, rng);
    const SymbolicState s = symbolic::run_symbolic(t);
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        const bool expect = symbolic::dependence_oracle(s, i, j).dependent;
        const bool got = symbolic::directed_path_exists(t, i, j)
                             ? symbolic::chain_dependence_predicate(t, i, j)
                             : symbolic::pivot_dependence_predicate(t, i, j);
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("graphical model matches the dependence oracle") {
  SplitRng rng(303);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(8));
    const OrientedTree t = random_tree(n, rng);
    const SymbolicState s = symbolic::run_symbolic(t);
    const auto gm = symbolic::graphical_model(s, 2.5);
    CHECK(gm.sigma2 == 2.5);
    CHECK(static_cast<int>(gm.edges.size()) == n - 1);
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        const bool dep = symbolic::dependence_oracle(s, i, j).dependent;
        const int lij = gm.laplacian[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
        CHECK(lij == (dep ? -1 : 0));
      }
    }
  }
  CHECK_THROWS_AS(symbolic::graphical_model(symbolic::run_symbolic(verify::demo5_tree()), 0.0),
                  std::invalid_argument);
}
