#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppsc/graph.hpp"
#include "ppsc/matrix.hpp"
#include "ppsc/mechanism.hpp"

namespace ppsc::analysis {

using mechanism::GossipMatrix;
using netgraph::Graph;
using netgraph::IndependentPartition;

// Expected one-step dynamics of randomized gossip: E[x(t)] = Abar E[x(t-1)] +
// mu_gamma vbar, with q1 the left Perron vector of P (sum one).
struct ExpectedDynamics {
  numerics::Matrix a_bar;
  std::vector<double> v_bar;
  std::vector<double> q1;
};

ExpectedDynamics expected_dynamics(const Graph& g, const GossipMatrix& p);

// Limit of E[x(t)]: unique solution of (I - Abar) m = mu_gamma vbar with
// 1^T m = 1^T x0. Solved as a constrained linear system; the generalized
// eigenvector expansion is equivalent and never formed.
std::vector<double> mean_limit(const Graph& g, const GossipMatrix& p,
                               std::span<const double> x0, double mu_gamma);

// Per-step participation probabilities xi = (1/n)(P + P^T) 1.
std::vector<double> participation_probabilities(const Graph& g, const GossipMatrix& p);

// Exact evaluation of the independent-partition lower bound on P(Q_t), the
// probability that every node has gossiped at least once by step t. Blocks
// larger than 16 nodes are rejected (the subset sum is exponential in block
// size); use encryption_time_bounds instead.
double encryption_prob_lower_bound(const Graph& g, const GossipMatrix& p,
                                   const IndependentPartition& part, int t);

struct EncryptionTimeBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// log eps / log(1 - xi_m)  <=  T_eps  <=  (log eps - log n) / log(1 - xi_m),
// with the xi_m = 1 degenerate case pinned to one step.
EncryptionTimeBounds encryption_time_bounds(const Graph& g, const GossipMatrix& p, double epsilon);

struct QtEstimate {
  int t = 0;
  double estimate = 0.0;
  double half_width = 0.0;  // Wilson 95% half-width
};

struct EncryptionStats {
  std::vector<double> xi;
  double xi_m = 0.0;
  std::vector<QtEstimate> q_t_estimates;  // t = 1..t_max
  std::vector<double> xi_hat;             // empirical per-step participation marginals
  int runs = 0;
  int t_max = 0;
};

// Monte Carlo estimate of P(Q_t) by simulating edge selection only (the
// event does not depend on the noise values).
EncryptionStats estimate_q_t(const Graph& g, const GossipMatrix& p, int t_max, int runs,
                             std::uint64_t seed);

// First t with 1 - P_hat(Q_t) <= epsilon, or -1 when not reached by t_max.
int estimated_t_eps(const EncryptionStats& stats, double epsilon);

// Report JSON: {xi, xi_m, bounds:{prop2:[[t,bound]..], prop3:{lower,upper}},
// mc:{q_t:[[t,est,hw]..], t_eps}}.
std::string analysis_report_to_json(const Graph& g, const GossipMatrix& p,
                                    const EncryptionStats& stats,
                                    const std::vector<int>& bound_ts, double epsilon,
                                    int indent = -1);

}  // namespace ppsc::analysis
