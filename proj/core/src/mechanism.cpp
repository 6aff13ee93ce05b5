#include "ppsc/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace ppsc::mechanism {

namespace {

using nlohmann::json;

struct StepOutcome {
  double gamma;
  double omega;
};

// Shared tail/head update; returns the per-step record values.
StepOutcome gossip_step(std::vector<double>& x, int tail, int head, double gamma) {
  const double omega = x[static_cast<std::size_t>(tail - 1)] - gamma;
  x[static_cast<std::size_t>(head - 1)] += omega;
  x[static_cast<std::size_t>(tail - 1)] = gamma;
  return {gamma, omega};
}

void check_final_against_matrices(const OrientedTree& t, const StateVector& beta,
                                  const std::vector<double>& gammas,
                                  const std::vector<double>& final,
                                  const MechanismMatrices* precomputed) {
  MechanismMatrices local;
  if (precomputed == nullptr) {
    local = symbolic::extract_matrices(symbolic::run_symbolic(t));
    precomputed = &local;
  }
  const std::vector<double> lin = apply_linear(*precomputed, beta.values, gammas);
  double binf = 0.0;
  for (double b : beta.values) binf = std::max(binf, std::abs(b));
  const double tol = 1e-10 * (1.0 + binf);
  for (std::size_t i = 0; i < final.size(); ++i) {
    if (std::abs(final[i] - lin[i]) > tol) {
      throw std::logic_error("run_dppsc: final state disagrees with C beta + D gamma");
    }
  }
}

}  // namespace

NoiseFamily noise_family_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "laplace") return NoiseFamily::laplace;
  if (name == "uniform") return NoiseFamily::uniform;
  throw std::invalid_argument("unknown noise family: " + name);
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::laplace: return "laplace";
    case NoiseFamily::uniform: return "uniform";
  }
  return "?";
}

NoiseModel::NoiseModel(NoiseFamily family, double mean, double variance)
    : family_(family), mean_(mean), variance_(variance) {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw std::invalid_argument("NoiseModel: variance must be positive and finite");
  }
}

double NoiseModel::laplace_scale() const {
  if (family_ != NoiseFamily::laplace) {
    throw std::logic_error("laplace_scale on a non-laplace model");
  }
  return std::sqrt(variance_ / 2.0);
}

double NoiseModel::sample(SplitRng& rng) const {
  switch (family_) {
    case NoiseFamily::gaussian:
      return rng.gaussian(mean_, std::sqrt(variance_));
    case NoiseFamily::laplace:
      return rng.laplace(mean_, std::sqrt(variance_ / 2.0));
    case NoiseFamily::uniform: {
      const double half_width = std::sqrt(3.0 * variance_);
      return rng.uniform(mean_ - half_width, mean_ + half_width);
    }
  }
  throw std::logic_error("NoiseModel: bad family");
}

GossipMatrix::GossipMatrix(const Graph& g, numerics::Matrix p) : p_(std::move(p)) {
  const int n = g.node_count();
  if (p_.rows() != n || p_.cols() != n) {
    throw std::invalid_argument("GossipMatrix: dimension mismatch with graph");
  }
  for (int i = 1; i <= n; ++i) {
    double row_sum = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double v = p_(i - 1, j - 1);
      if (v < 0.0) throw std::invalid_argument("GossipMatrix: negative entry");
      if (i == j && v != 0.0) throw std::invalid_argument("GossipMatrix: nonzero diagonal");
      if (i != j) {
        const bool edge = g.has_edge(i, j);
        if (edge != (v > 0.0)) {
          throw std::invalid_argument("GossipMatrix: support must match the edge set");
        }
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-12) {
      throw std::invalid_argument("GossipMatrix: row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

GossipMatrix GossipMatrix::uniform(const Graph& g) {
  const int n = g.node_count();
  numerics::Matrix p(n, n);
  for (int i = 1; i <= n; ++i) {
    const auto& nbrs = g.neighbors(i);
    if (nbrs.empty()) throw std::invalid_argument("GossipMatrix: isolated node " + std::to_string(i));
    for (int j : nbrs) p(i - 1, j - 1) = 1.0 / static_cast<double>(nbrs.size());
  }
  return GossipMatrix(g, std::move(p));
}

RunTrace run_dppsc(const OrientedTree& t, const StateVector& beta, const NoiseModel& noise,
                   std::uint64_t seed, const MechanismMatrices* precomputed) {
  const int n = t.node_count();
  if (static_cast<int>(beta.values.size()) != n) {
    throw std::invalid_argument("run_dppsc: beta length mismatch");
  }
  SplitRng run_rng(seed);
  std::vector<double> gammas;
  gammas.reserve(static_cast<std::size_t>(n - 1));
  for (int step = 1; step <= n - 1; ++step) {
    SplitRng step_rng = run_rng.split(static_cast<std::uint64_t>(step));
    gammas.push_back(noise.sample(step_rng));
  }
  RunTrace trace = run_dppsc_with_noise(t, beta, gammas, precomputed);
  trace.seed = seed;
  return trace;
}

RunTrace run_dppsc_with_noise(const OrientedTree& t, const StateVector& beta,
                              std::span<const double> gammas,
                              const MechanismMatrices* precomputed) {
  const int n = t.node_count();
  if (static_cast<int>(beta.values.size()) != n) {
    throw std::invalid_argument("run_dppsc: beta length mismatch");
  }
  if (static_cast<int>(gammas.size()) != n - 1) {
    throw std::invalid_argument("run_dppsc: need exactly n-1 gamma values");
  }
  RunTrace trace;
  trace.algorithm = "dppsc";
  std::vector<double> x = beta.values;
  double prev_sum = numerics::sum(x);
  for (int step = 1; step <= n - 1; ++step) {
    const DirectedEdge& e = t.edge(step - 1);
    const StepOutcome o = gossip_step(x, e.tail, e.head, gammas[static_cast<std::size_t>(step - 1)]);
    const double s = numerics::sum(x);
    trace.max_sum_drift = std::max(trace.max_sum_drift, std::abs(s - prev_sum));
    prev_sum = s;
    trace.steps.push_back(TraceStep{step, e.tail, e.head, o.gamma, o.omega, x});
  }
  trace.final = x;
  check_final_against_matrices(t, beta, {gammas.begin(), gammas.end()}, trace.final, precomputed);
  return trace;
}

RunTrace run_rppsc(const Graph& g, const GossipMatrix& p, const StateVector& beta,
                   const NoiseModel& noise, int steps, std::uint64_t seed) {
  const int n = g.node_count();
  if (static_cast<int>(beta.values.size()) != n) {
    throw std::invalid_argument("run_rppsc: beta length mismatch");
  }
  if (steps < 1) throw std::invalid_argument("run_rppsc: steps must be >= 1");
  if (int u = g.first_unreachable(); u != 0) {
    throw std::invalid_argument("run_rppsc: graph disconnected, node " + std::to_string(u) +
                                " unreachable");
  }
  RunTrace trace;
  trace.seed = seed;
  trace.algorithm = "rppsc";
  SplitRng run_rng(seed);
  std::vector<double> x = beta.values;
  std::vector<double> row(static_cast<std::size_t>(n));
  double prev_sum = numerics::sum(x);
  for (int step = 1; step <= steps; ++step) {
    SplitRng step_rng = run_rng.split(static_cast<std::uint64_t>(step));
    const int i = static_cast<int>(step_rng.below(static_cast<std::uint64_t>(n))) + 1;
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = p.p()(i - 1, j);
    const int j = static_cast<int>(step_rng.pick_weighted(row)) + 1;
    const StepOutcome o = gossip_step(x, i, j, noise.sample(step_rng));
    const double s = numerics::sum(x);
    trace.max_sum_drift = std::max(trace.max_sum_drift, std::abs(s - prev_sum));
    prev_sum = s;
    trace.steps.push_back(TraceStep{step, i, j, o.gamma, o.omega, x});
  }
  trace.final = x;
  return trace;
}

std::vector<double> run_rppsc_final(const Graph& g, const GossipMatrix& p,
                                    const StateVector& beta, const NoiseModel& noise, int steps,
                                    std::uint64_t seed) {
  const int n = g.node_count();
  if (static_cast<int>(beta.values.size()) != n || steps < 1) {
    throw std::invalid_argument("run_rppsc_final: bad arguments");
  }
  SplitRng run_rng(seed);
  std::vector<double> x = beta.values;
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int step = 1; step <= steps; ++step) {
    SplitRng step_rng = run_rng.split(static_cast<std::uint64_t>(step));
    const int i = static_cast<int>(step_rng.below(static_cast<std::uint64_t>(n))) + 1;
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = p.p()(i - 1, j);
    const int j = static_cast<int>(step_rng.pick_weighted(row)) + 1;
    gossip_step(x, i, j, noise.sample(step_rng));
  }
  return x;
}

int default_rppsc_steps(int n) {
  if (n < 2) throw std::invalid_argument("default_rppsc_steps: need n >= 2");
  const double eps = 0.01;
  return static_cast<int>(std::ceil(n * std::log(n / eps)));
}

std::vector<double> apply_linear(const MechanismMatrices& mm, std::span<const double> beta,
                                 std::span<const double> gamma) {
  const int n = static_cast<int>(mm.c.size());
  const int t = n == 0 ? 0 : static_cast<int>(mm.d.front().size());
  if (static_cast<int>(beta.size()) != n || static_cast<int>(gamma.size()) != t) {
    throw std::invalid_argument("apply_linear: size mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const int c = mm.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (c != 0) acc += c * beta[static_cast<std::size_t>(j)];
    }
    for (int k = 0; k < t; ++k) {
      const int d = mm.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (d != 0) acc += d * gamma[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::string trace_to_json(const RunTrace& trace, const std::string& graph_ref, bool redact,
                          int indent) {
  json steps = json::array();
  for (const TraceStep& s : trace.steps) {
    json step{{"t", s.t}, {"tail", s.tail}, {"head", s.head}, {"omega", s.omega}};
    if (!redact) {
      step["gamma"] = s.gamma;
      step["state"] = s.state;
    }
    steps.push_back(std::move(step));
  }
  json doc{{"seed", trace.seed},
           {"algorithm", trace.algorithm},
           {"graph_ref", graph_ref},
           {"steps", std::move(steps)},
           {"final", trace.final}};
  return doc.dump(indent);
}

}  // namespace ppsc::mechanism
