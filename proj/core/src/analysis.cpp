#include "ppsc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ppsc/rng.hpp"

namespace ppsc::analysis {
namespace {

using numerics::Matrix;

void require_connected(const Graph& g) {
  if (int u = g.first_unreachable(); u != 0) {
    throw std::invalid_argument("analysis: graph disconnected, node " + std::to_string(u) +
                                " unreachable");
  }
}

}  // namespace

ExpectedDynamics expected_dynamics(const Graph& g, const GossipMatrix& p) {
  require_connected(g);
  const int n = g.node_count();
  const Matrix pt = p.p().transpose();
  ExpectedDynamics dyn;
  dyn.a_bar = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      dyn.a_bar(i, j) = delta + (pt(i, j) - delta) / static_cast<double>(n);
    }
  }
  dyn.v_bar.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += pt(i, j);
    dyn.v_bar[static_cast<std::size_t>(i)] = (1.0 - row) / static_cast<double>(n);
  }

  // Left Perron vector of P: the one-dimensional kernel of I - P^T.
  Matrix fixed(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) fixed(i, j) = (i == j ? 1.0 : 0.0) - pt(i, j);
  }
  const Matrix kb = numerics::kernel_basis(fixed);
  if (kb.cols() != 1) {
    throw std::runtime_error("expected_dynamics: Perron kernel dimension " +
                             std::to_string(kb.cols()) + ", expected 1");
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += kb(i, 0);
  if (std::abs(total) < 1e-12) throw std::runtime_error("expected_dynamics: degenerate Perron vector");
  dyn.q1.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    dyn.q1[static_cast<std::size_t>(i)] = kb(i, 0) / total;
    if (dyn.q1[static_cast<std::size_t>(i)] < -1e-10) {
      throw std::runtime_error("expected_dynamics: Perron vector not positive");
    }
  }
  return dyn;
}

std::vector<double> mean_limit(const Graph& g, const GossipMatrix& p,
                               std::span<const double> x0, double mu_gamma) {
  require_connected(g);
  const int n = g.node_count();
  if (static_cast<int>(x0.size()) != n) throw std::invalid_argument("mean_limit: x0 length mismatch");
  const ExpectedDynamics dyn = expected_dynamics(g, p);

  Matrix i_minus_abar(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) i_minus_abar(i, j) = (i == j ? 1.0 : 0.0) - dyn.a_bar(i, j);
  }
  if (numerics::rank(i_minus_abar) != n - 1) {
    throw std::runtime_error("mean_limit: rank of I - Abar is not n-1");
  }

  Matrix stacked(n + 1, n);
  std::vector<double> rhs(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) stacked(i, j) = i_minus_abar(i, j);
    rhs[static_cast<std::size_t>(i)] = mu_gamma * dyn.v_bar[static_cast<std::size_t>(i)];
    stacked(n, i) = 1.0;
  }
  rhs[static_cast<std::size_t>(n)] = numerics::sum(x0);

  std::vector<double> m = numerics::solve_least_squares(stacked, rhs);
  const std::vector<double> back = stacked.apply(m);
  double resid = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) resid = std::max(resid, std::abs(back[i] - rhs[i]));
  if (resid > 1e-10 * (1.0 + numerics::norm2(rhs))) {
    throw std::runtime_error("mean_limit: constrained system residual too large");
  }
  // Pin the conserved sum.
  const double correction = (rhs[static_cast<std::size_t>(n)] - numerics::sum(m)) /
                            static_cast<double>(n);
  for (double& mi : m) mi += correction;
  return m;
}

std::vector<double> participation_probabilities(const Graph& g, const GossipMatrix& p) {
  const int n = g.node_count();
  std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += p.p()(i, j) + p.p()(j, i);
    xi[static_cast<std::size_t>(i)] = acc / static_cast<double>(n);
  }
  return xi;
}

double encryption_prob_lower_bound(const Graph& g, const GossipMatrix& p,
                                   const IndependentPartition& part, int t) {
  require_connected(g);
  if (t < 0) throw std::invalid_argument("encryption_prob_lower_bound: t must be >= 0");
  if (!netgraph::partition_valid(g, part)) {
    throw std::invalid_argument("encryption_prob_lower_bound: invalid independent partition");
  }
  const std::vector<double> xi = participation_probabilities(g, p);
  const double kappa = static_cast<double>(part.blocks.size());

  double bound = 1.0 - kappa;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    std::vector<int> rest;
    for (int node : part.blocks[b]) {
      if (node != part.representatives[b]) rest.push_back(node);
    }
    if (rest.size() > 15) {
      throw std::invalid_argument(
          "encryption_prob_lower_bound: block exceeds 16 nodes; use the encryption_time_bounds "
          "estimate instead");
    }
    const double xi_rep = xi[static_cast<std::size_t>(part.representatives[b] - 1)];
    const std::size_t subsets = static_cast<std::size_t>(1) << rest.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      double xi_sum = 0.0;
      int bits = 0;
      for (std::size_t r = 0; r < rest.size(); ++r) {
        if (mask & (static_cast<std::size_t>(1) << r)) {
          xi_sum += xi[static_cast<std::size_t>(rest[r] - 1)];
          ++bits;
        }
      }
      const double sign = bits % 2 == 0 ? 1.0 : -1.0;
      bound += sign * (std::pow(1.0 - xi_sum, t) - std::pow(1.0 - xi_rep - xi_sum, t));
    }
  }
  return bound;
}

EncryptionTimeBounds encryption_time_bounds(const Graph& g, const GossipMatrix& p,
                                            double epsilon) {
  require_connected(g);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("encryption_time_bounds: epsilon must be in (0,1)");
  }
  const std::vector<double> xi = participation_probabilities(g, p);
  const double xi_m = *std::min_element(xi.begin(), xi.end());
  if (xi_m >= 1.0 - 1e-15) {
    return {1.0, 1.0};  // every step touches all nodes
  }
  const double log_decay = std::log(1.0 - xi_m);
  const double n = static_cast<double>(g.node_count());
  return {std::log(epsilon) / log_decay, (std::log(epsilon) - std::log(n)) / log_decay};
}

EncryptionStats estimate_q_t(const Graph& g, const GossipMatrix& p, int t_max, int runs,
                             std::uint64_t seed) {
  require_connected(g);
  if (runs < 1 || t_max < 1) throw std::invalid_argument("estimate_q_t: need runs, t_max >= 1");
  const int n = g.node_count();

  EncryptionStats stats;
  stats.xi = participation_probabilities(g, p);
  stats.xi_m = *std::min_element(stats.xi.begin(), stats.xi.end());
  stats.runs = runs;
  stats.t_max = t_max;

  std::vector<std::int64_t> complete_by(static_cast<std::size_t>(t_max) + 1, 0);
  std::vector<std::int64_t> touch_count(static_cast<std::size_t>(n), 0);
  SplitRng master(seed);
  std::vector<char> touched(static_cast<std::size_t>(n));
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int run = 0; run < runs; ++run) {
    SplitRng run_rng = master.split(static_cast<std::uint64_t>(run));
    std::fill(touched.begin(), touched.end(), 0);
    int remaining = n;
    int done_at = -1;
    for (int t = 1; t <= t_max; ++t) {
      SplitRng step_rng = run_rng.split(static_cast<std::uint64_t>(t));
      const int i = static_cast<int>(step_rng.below(static_cast<std::uint64_t>(n)));
      for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = p.p()(i, j);
      const int j = static_cast<int>(step_rng.pick_weighted(row));
      ++touch_count[static_cast<std::size_t>(i)];
      ++touch_count[static_cast<std::size_t>(j)];
      if (!touched[static_cast<std::size_t>(i)]) {
        touched[static_cast<std::size_t>(i)] = 1;
        --remaining;
      }
      if (!touched[static_cast<std::size_t>(j)]) {
        touched[static_cast<std::size_t>(j)] = 1;
        --remaining;
      }
      if (remaining == 0 && done_at < 0) done_at = t;
    }
    if (done_at > 0) ++complete_by[static_cast<std::size_t>(done_at)];
  }

  // Wilson 95% interval half-widths around the empirical P(Q_t).
  const double z = 1.959963984540054;
  std::int64_t cum = 0;
  for (int t = 1; t <= t_max; ++t) {
    cum += complete_by[static_cast<std::size_t>(t)];
    const double p_hat = static_cast<double>(cum) / static_cast<double>(runs);
    const double nr = static_cast<double>(runs);
    const double denom = 1.0 + z * z / nr;
    const double hw = z * std::sqrt(p_hat * (1.0 - p_hat) / nr + z * z / (4.0 * nr * nr)) / denom;
    stats.q_t_estimates.push_back(QtEstimate{t, p_hat, hw});
  }
  stats.xi_hat.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    stats.xi_hat[static_cast<std::size_t>(i)] =
        static_cast<double>(touch_count[static_cast<std::size_t>(i)]) /
        (static_cast<double>(runs) * static_cast<double>(t_max));
  }
  return stats;
}

int estimated_t_eps(const EncryptionStats& stats, double epsilon) {
  for (const QtEstimate& q : stats.q_t_estimates) {
    if (1.0 - q.estimate <= epsilon) return q.t;
  }
  return -1;
}

std::string analysis_report_to_json(const Graph& g, const GossipMatrix& p,
                                    const EncryptionStats& stats,
                                    const std::vector<int>& bound_ts, double epsilon,
                                    int indent) {
  nlohmann::json prop2 = nlohmann::json::array();
  const IndependentPartition part = netgraph::greedy_independent_partition(g);
  std::size_t max_block = 0;
  for (const auto& block : part.blocks) max_block = std::max(max_block, block.size());
  if (max_block <= 16) {
    for (int t : bound_ts) {
      prop2.push_back({t, encryption_prob_lower_bound(g, p, part, t)});
    }
  }  // else: blocks too large for the exact subset sum; prop2 left empty
  const EncryptionTimeBounds bounds = encryption_time_bounds(g, p, epsilon);
  nlohmann::json q_t = nlohmann::json::array();
  for (const QtEstimate& q : stats.q_t_estimates) q_t.push_back({q.t, q.estimate, q.half_width});
  nlohmann::json doc{
      {"xi", stats.xi},
      {"xi_m", stats.xi_m},
      {"bounds", {{"prop2", std::move(prop2)}, {"prop3", {{"lower", bounds.lower}, {"upper", bounds.upper}}}}},
      {"mc", {{"q_t", std::move(q_t)}, {"t_eps", estimated_t_eps(stats, epsilon)}}}};
  return doc.dump(indent);
}

}  // namespace ppsc::analysis
