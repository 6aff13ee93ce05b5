#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "ppsc/analysis.hpp"
#include "ppsc/verify.hpp"

using namespace ppsc;
using mechanism::GossipMatrix;
using netgraph::Graph;

TEST_CASE("expected dynamics invariants") {
  const Graph g = verify::demo5_graph();
  const GossipMatrix p = GossipMatrix::uniform(g);
  const auto dyn = analysis::expected_dynamics(g, p);
  const int n = 5;
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += dyn.a_bar(i, j);
    CHECK(col == doctest::Approx(1.0).epsilon(1e-12));  // 1^T Abar = 1^T
  }
  CHECK(std::abs(numerics::sum(dyn.v_bar)) <= 1e-12);
  CHECK(numerics::sum(dyn.q1) == doctest::Approx(1.0));
  // q1 is the left Perron vector: P^T q1 = q1, entrywise positive.
  const std::vector<double> pq = p.p().transpose().apply(dyn.q1);
  for (int i = 0; i < n; ++i) {
    CHECK(pq[static_cast<std::size_t>(i)] == doctest::Approx(dyn.q1[static_cast<std::size_t>(i)]).epsilon(1e-9));
    CHECK(dyn.q1[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("mean limit") {
  const Graph g = verify::demo5_graph();
  const GossipMatrix p = GossipMatrix::uniform(g);
  const std::vector<double> x0 = {1, -2, 4, 0.5, 2.5};

  SUBCASE("zero-mean noise gives the Perron profile") {
    const auto dyn = analysis::expected_dynamics(g, p);
    const std::vector<double> m = analysis::mean_limit(g, p, x0, 0.0);
    const double total = numerics::sum(x0);
    for (int i = 0; i < 5; ++i) {
      CHECK(m[static_cast<std::size_t>(i)] ==
            doctest::Approx(dyn.q1[static_cast<std::size_t>(i)] * total).epsilon(1e-9));
    }
  }

  SUBCASE("doubly stochastic matrix gives the average") {
    const Graph ring = Graph::ring_graph(4);
    const GossipMatrix uniform = GossipMatrix::uniform(ring);
    const std::vector<double> y0 = {3.0, 1.0, -2.0, 6.0};
    const std::vector<double> m = analysis::mean_limit(ring, uniform, y0, 0.0);
    for (double mi : m) CHECK(std::abs(mi - 2.0) <= 1e-10);
    // The noise mean cannot shift a doubly stochastic network.
    const std::vector<double> m2 = analysis::mean_limit(ring, uniform, y0, 5.0);
    for (double mi : m2) CHECK(std::abs(mi - 2.0) <= 1e-10);
  }

  SUBCASE("sum pinned exactly") {
    const std::vector<double> m = analysis::mean_limit(g, p, x0, 1.5);
    CHECK(std::abs(numerics::sum(m) - numerics::sum(x0)) <= 1e-12 * (1.0 + std::abs(numerics::sum(x0))));
  }

  SUBCASE("monte carlo agreement on an asymmetric ring") {
    const Graph ring = Graph::ring_graph(4);
    numerics::Matrix pm(4, 4);
    pm(0, 1) = 0.9; pm(0, 3) = 0.1;
    pm(1, 0) = 0.5; pm(1, 2) = 0.5;
    pm(2, 1) = 0.2; pm(2, 3) = 0.8;
    pm(3, 0) = 0.4; pm(3, 2) = 0.6;
    const GossipMatrix gossip(ring, pm);
    const std::vector<double> y0 = {1.0, 2.0, 3.0, 4.0};
    const double mu_gamma = 2.0;
    const std::vector<double> m = analysis::mean_limit(ring, gossip, y0, mu_gamma);

    const mechanism::NoiseModel noise(mechanism::NoiseFamily::gaussian, mu_gamma, 1.0);
    const int runs = 4000;
    std::vector<double> acc(4, 0.0), acc2(4, 0.0);
    SplitRng rng(555);
    for (int r = 0; r < runs; ++r) {
      const auto fin = mechanism::run_rppsc_final(ring, gossip, {y0, 0}, noise, 400,
                                                  rng.split(static_cast<std::uint64_t>(r)).stream_key());
      for (int i = 0; i < 4; ++i) {
        acc[static_cast<std::size_t>(i)] += fin[static_cast<std::size_t>(i)];
        acc2[static_cast<std::size_t>(i)] += fin[static_cast<std::size_t>(i)] * fin[static_cast<std::size_t>(i)];
      }
    }
    for (int i = 0; i < 4; ++i) {
      const double mean = acc[static_cast<std::size_t>(i)] / runs;
      const double var = acc2[static_cast<std::size_t>(i)] / runs - mean * mean;
      const double se = std::sqrt(var / runs);
      CHECK(std::abs(mean - m[static_cast<std::size_t>(i)]) <= 5.0 * se);
    }
  }
}

TEST_CASE("participation probabilities") {
  const Graph g = verify::demo5_graph();
  const GossipMatrix p = GossipMatrix::uniform(g);
  const std::vector<double> xi = analysis::participation_probabilities(g, p);
  CHECK(numerics::sum(xi) == doctest::Approx(2.0).epsilon(1e-12));  // two nodes per step
  CHECK(xi[0] == doctest::Approx((1.0 + 1.0 / 3 + 1.0 / 3) / 5.0));
  for (double x : xi) {
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("encryption probability lower bound") {
  const Graph k3 = Graph::complete_graph(3);
  const GossipMatrix p = GossipMatrix::uniform(k3);
  const auto part = netgraph::greedy_independent_partition(k3);
  REQUIRE(part.blocks.size() == 3);  // singleton blocks on a complete graph
  const std::vector<double> xi = analysis::participation_probabilities(k3, p);
  for (int t : {1, 3, 10}) {
    double expected = 1.0;
    for (double x : xi) expected -= std::pow(1.0 - x, t);
    CHECK(analysis::encryption_prob_lower_bound(k3, p, part, t) == doctest::Approx(expected).epsilon(1e-12));
  }
  // t = 0: nothing has moved, the bound degenerates to 1 - kappa <= 0.
  CHECK(analysis::encryption_prob_lower_bound(k3, p, part, 0) <= 0.0);

  // Oversized blocks are rejected with a pointer to the coarser bound.
  std::vector<netgraph::Edge> star_edges;
  for (int leaf = 2; leaf <= 20; ++leaf) star_edges.push_back({1, leaf});
  const Graph star(20, star_edges);
  const GossipMatrix sp = GossipMatrix::uniform(star);
  const auto spart = netgraph::greedy_independent_partition(star);
  CHECK_THROWS_WITH_AS(analysis::encryption_prob_lower_bound(star, sp, spart, 5),
                       doctest::Contains("encryption_time_bounds"), std::invalid_argument);
}

TEST_CASE("encryption time bounds") {
  const Graph pair = Graph::path_graph(2);
  const GossipMatrix pp = GossipMatrix::uniform(pair);
  const auto degenerate = analysis::encryption_time_bounds(pair, pp, 0.5);
  CHECK(degenerate.lower == 1.0);
  CHECK(degenerate.upper == 1.0);

  const Graph ring = Graph::ring_graph(10);
  const GossipMatrix rp = GossipMatrix::uniform(ring);
  const auto bounds = analysis::encryption_time_bounds(ring, rp, 0.01);
  CHECK(bounds.lower > 0.0);
  CHECK(bounds.upper > bounds.lower);
  // upper - lower = -log n / log(1 - xi_m).
  const std::vector<double> xi = analysis::participation_probabilities(ring, rp);
  const double xi_m = *std::min_element(xi.begin(), xi.end());
  CHECK(bounds.upper - bounds.lower ==
        doctest::Approx(-std::log(10.0) / std::log(1.0 - xi_m)).epsilon(1e-12));
  CHECK_THROWS_AS(analysis::encryption_time_bounds(ring, rp, 1.5), std::invalid_argument);
}

TEST_CASE("q_t estimation") {
  const Graph g = verify::demo5_graph();
  const GossipMatrix p = GossipMatrix::uniform(g);
  const auto stats = analysis::estimate_q_t(g, p, 48, 20000, 99);

  double prev = 0.0;
  for (const auto& q : stats.q_t_estimates) {
    CHECK(q.estimate >= prev);  // Q_t is monotone
    CHECK(q.estimate >= 0.0);
    CHECK(q.estimate <= 1.0);
    CHECK(q.half_width > 0.0);
    prev = q.estimate;
  }
  CHECK(stats.q_t_estimates.back().estimate > 0.999);

  // Empirical per-step participation marginals match xi within 3 sigma.
  const double steps = static_cast<double>(stats.runs) * stats.t_max;
  for (int i = 0; i < 5; ++i) {
    const double xi = stats.xi[static_cast<std::size_t>(i)];
    const double sd = std::sqrt(xi * (1.0 - xi) / steps);
    CHECK(std::abs(stats.xi_hat[static_cast<std::size_t>(i)] - xi) <= 3.0 * sd);
  }

  const int t_eps = analysis::estimated_t_eps(stats, 0.01);
  CHECK(t_eps > 0);
  const auto bounds = analysis::encryption_time_bounds(g, p, 0.01);
  CHECK(bounds.lower <= t_eps);
  CHECK(t_eps <= std::ceil(bounds.upper));  // integer inf vs real-valued bound
}

TEST_CASE("analysis report serialization") {
  const Graph g = verify::demo5_graph();
  const GossipMatrix p = GossipMatrix::uniform(g);
  const auto stats = analysis::estimate_q_t(g, p, 24, 2000, 7);
  const auto doc = nlohmann::json::parse(
      analysis::analysis_report_to_json(g, p, stats, {5, 10}, 0.01));
  CHECK(doc["xi"].size() == 5);
  CHECK(doc["bounds"]["prop2"].size() == 2);
  CHECK(doc["bounds"]["prop3"].contains("lower"));
  CHECK(doc["bounds"]["prop3"].contains("upper"));
  CHECK(doc["mc"]["q_t"].size() == 24);
  CHECK(doc["mc"].contains("t_eps"));
}
