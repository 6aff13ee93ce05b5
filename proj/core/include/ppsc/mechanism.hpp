#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppsc/graph.hpp"
#include "ppsc/matrix.hpp"
#include "ppsc/rng.hpp"
#include "ppsc/symbolic.hpp"

namespace ppsc::mechanism {

using netgraph::DirectedEdge;
using netgraph::Graph;
using netgraph::OrientedTree;
using symbolic::MechanismMatrices;

enum class NoiseFamily { gaussian, laplace, uniform };

NoiseFamily noise_family_from_string(const std::string& name);
std::string to_string(NoiseFamily family);

// Distribution of the per-step symbols gamma_t. Laplace is parameterized so
// that variance = 2 v^2 with scale v.
class NoiseModel {
 public:
  NoiseModel(NoiseFamily family, double mean, double variance);

  NoiseFamily family() const { return family_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double laplace_scale() const;  // v; laplace family only

  double sample(SplitRng& rng) const;

 private:
  NoiseFamily family_;
  double mean_;
  double variance_;
};

inline double sample_noise(const NoiseModel& noise, SplitRng& rng) { return noise.sample(rng); }

struct StateVector {
  std::vector<double> values;
  int t = 0;
};

struct TraceStep {
  int t = 0;
  int tail = 0;
  int head = 0;
  double gamma = 0.0;  // debug section: never transmitted
  double omega = 0.0;  // the on-wire packet
  std::vector<double> state;  // debug section: post-step states
};

struct RunTrace {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::vector<TraceStep> steps;
  std::vector<double> final;
  // Largest per-step |sum(x(t)) - sum(x(t-1))| observed; recorded so callers
  // can audit summation consistency without replaying.
  double max_sum_drift = 0.0;
};

// Row-stochastic matrix aligned with the graph: P_ij > 0 iff {i,j} is an
// edge, zero diagonal.
class GossipMatrix {
 public:
  GossipMatrix(const Graph& g, numerics::Matrix p);
  static GossipMatrix uniform(const Graph& g);

  const numerics::Matrix& p() const { return p_; }
  int node_count() const { return p_.rows(); }

 private:
  numerics::Matrix p_;
};

// The n-1 deterministic gossip steps over the oriented tree. The final state
// is cross-checked against C beta + D gamma from the symbolic run; a
// precomputed MechanismMatrices may be supplied to amortize that across many
// runs of the same tree.
RunTrace run_dppsc(const OrientedTree& t, const StateVector& beta, const NoiseModel& noise,
                   std::uint64_t seed, const MechanismMatrices* precomputed = nullptr);

// Same recursion with the gamma values pinned by the caller (no RNG).
RunTrace run_dppsc_with_noise(const OrientedTree& t, const StateVector& beta,
                              std::span<const double> gammas,
                              const MechanismMatrices* precomputed = nullptr);

// Randomized gossip: per step, a uniformly random initiator picks a neighbor
// from its row of P, then the same tail/head update runs.
RunTrace run_rppsc(const Graph& g, const GossipMatrix& p, const StateVector& beta,
                   const NoiseModel& noise, int steps, std::uint64_t seed);

// Lean variant for Monte Carlo sweeps: final state only, no per-step records.
std::vector<double> run_rppsc_final(const Graph& g, const GossipMatrix& p,
                                    const StateVector& beta, const NoiseModel& noise, int steps,
                                    std::uint64_t seed);

// Default R-PPSC step budget ceil(n ln(n/eps)) with eps = 0.01, following the
// encryption-time upper bound shape.
int default_rppsc_steps(int n);

// beta_sharp = C beta + D gamma.
std::vector<double> apply_linear(const MechanismMatrices& mm, std::span<const double> beta,
                                 std::span<const double> gamma);

// Trace serialization; redact drops the debug fields (gamma, state) so the
// record holds only what travels on the wire.
std::string trace_to_json(const RunTrace& trace, const std::string& graph_ref, bool redact,
                          int indent = -1);

}  // namespace ppsc::mechanism
