#include "ppsc/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ppsc/mechanism.hpp"
#include "ppsc/rng.hpp"

namespace ppsc::privacy {
namespace {

using numerics::Matrix;

int mech_n(const MechanismMatrices& m) { return static_cast<int>(m.c.size()); }
int mech_t(const MechanismMatrices& m) {
  return m.d.empty() ? 0 : static_cast<int>(m.d.front().size());
}

// sigma2 * D D^T two ways: the entrywise rule (diagonal ||d_i||^2, off-diag
// -1 exactly when rows i and j share a noise column with product -1) and the
// plain matrix product. They must agree exactly for tree runs.
Matrix noise_covariance(const MechanismMatrices& m, double sigma2) {
  const int n = mech_n(m);
  const int t = mech_t(m);
  Matrix by_rule(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        int norm2 = 0;
        for (int k = 0; k < t; ++k) {
          const int d = m.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
          norm2 += d * d;
        }
        by_rule(i, j) = sigma2 * norm2;
      } else {
        bool shared = false;
        for (int k = 0; k < t && !shared; ++k) {
          shared = m.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                       m.d[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] ==
                   -1;
        }
        by_rule(i, j) = shared ? -sigma2 : 0.0;
      }
    }
  }
  const Matrix d = m.d_matrix();
  const Matrix by_product = (d * d.transpose()).scaled(sigma2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (by_rule(i, j) != by_product(i, j)) {
        throw std::logic_error("noise covariance: entrywise rule disagrees with sigma2 D D^T");
      }
    }
  }
  return by_rule;
}

// Lambda_* = blkdiag(0, Lambda_yy^{-1}) with the first coordinate split off.
Matrix lambda_star(const MechanismMatrices& m, double sigma2) {
  const int n = mech_n(m);
  if (n < 2) throw std::invalid_argument("lambda_star: need n >= 2");
  const Matrix lambda_d = noise_covariance(m, sigma2);
  Matrix lambda_yy(n - 1, n - 1);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) lambda_yy(i - 1, j - 1) = lambda_d(i, j);
  }
  Matrix inv;
  try {
    inv = numerics::spd_inverse(lambda_yy);
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("lambda_star: Lambda_yy numerically singular");
  }
  Matrix star(n, n);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) star(i, j) = inv(i - 1, j - 1);
  }
  return star;
}

void check_observations(const AdversaryObservations& obs) {
  const int n = mech_n(obs.mechanism);
  if (obs.samples.empty()) throw std::invalid_argument("adversary: need l >= 1 samples");
  if (!(obs.noise_sigma2 > 0.0)) throw std::invalid_argument("adversary: sigma2 must be positive");
  const double s0 = numerics::sum(obs.samples.front());
  for (const auto& y : obs.samples) {
    if (static_cast<int>(y.size()) != n) {
      throw std::invalid_argument("adversary: sample length mismatch");
    }
    if (std::abs(numerics::sum(y) - s0) > 1e-6 * (1.0 + std::abs(s0))) {
      throw std::invalid_argument("adversary: samples violate summation consistency");
    }
  }
}

struct KktPieces {
  Matrix h;
  Matrix a_eq;
  std::vector<double> grad_rhs;
  std::vector<double> eq_rhs;
};

KktPieces mle_system(const AdversaryObservations& obs) {
  const int n = mech_n(obs.mechanism);
  const int l = static_cast<int>(obs.samples.size());
  const Matrix c = obs.mechanism.c_matrix();
  const Matrix star = lambda_star(obs.mechanism, obs.noise_sigma2);
  const Matrix ct_star = c.transpose() * star;

  KktPieces k;
  k.h = (ct_star * c).scaled(static_cast<double>(l));
  k.a_eq = Matrix(1, n, 1.0);
  std::vector<double> y_sum(static_cast<std::size_t>(n), 0.0);
  for (const auto& y : obs.samples) {
    for (int i = 0; i < n; ++i) y_sum[static_cast<std::size_t>(i)] += y[static_cast<std::size_t>(i)];
  }
  k.grad_rhs = ct_star.apply(y_sum);
  k.eq_rhs = {numerics::sum(obs.samples.front())};
  return k;
}

double stationarity_residual(const KktPieces& k, std::span<const double> x, double lambda) {
  std::vector<double> r = k.h.apply(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    worst = std::max(std::abs(r[i] + lambda * k.a_eq(0, static_cast<int>(i)) -
                              k.grad_rhs[i]),
                     worst);
  }
  return worst;
}

}  // namespace

NonIdentifiabilityResult check_non_identifiability(const MechanismMatrices& m) {
  const Matrix c = m.c_matrix();
  NonIdentifiabilityResult res;
  res.ok = numerics::rank(c) < c.rows();
  res.certificate = numerics::kernel_basis(c);
  return res;
}

DpParams dp_params(const MechanismMatrices& m, const GraphicalModel& gm, double delta, double v) {
  return DpParams{delta, v, dp_budget(m, gm, delta, v)};
}

double dp_budget(const MechanismMatrices& m, const GraphicalModel& gm, double delta, double v) {
  if (!(delta > 0.0) || !(v > 0.0)) {
    throw std::invalid_argument("dp_budget: delta and v must be positive");
  }
  const int n = mech_n(m);
  if (static_cast<int>(gm.laplacian.size()) != n) {
    throw std::invalid_argument("dp_budget: graphical model size mismatch");
  }
  int max_deg = 0;
  for (int i = 0; i < n; ++i) {
    max_deg = std::max(max_deg, gm.laplacian[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
  }
  const Matrix d = m.d_matrix();
  const double sigma_m = numerics::smallest_abs_eigenvalue(d.transpose() * d);
  return delta * std::sqrt(static_cast<double>(n - 1)) * static_cast<double>(max_deg) /
         (v * sigma_m);
}

bool is_delta_adjacent(std::span<const double> beta, std::span<const double> beta_prime,
                       double delta) {
  if (beta.size() != beta_prime.size()) return false;
  int differing = 0;
  double gap = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double d = std::abs(beta[i] - beta_prime[i]);
    if (d > 0.0) {
      ++differing;
      gap = std::max(gap, d);
    }
  }
  return differing <= 1 && gap <= delta * (1.0 + 1e-12);
}

double dp_ratio_check(const MechanismMatrices& m, std::span<const double> beta,
                      std::span<const double> beta_prime, double delta, double v, int trials,
                      std::uint64_t seed) {
  const int n = mech_n(m);
  const int t = mech_t(m);
  if (static_cast<int>(beta.size()) != n || static_cast<int>(beta_prime.size()) != n) {
    throw std::invalid_argument("dp_ratio_check: input length mismatch");
  }
  if (!(v > 0.0) || trials < 1) throw std::invalid_argument("dp_ratio_check: bad parameters");

  std::vector<double> diff(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) diff[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i)] -
                                                                  beta_prime[static_cast<std::size_t>(i)];
  const Matrix c = m.c_matrix();
  const std::vector<double> c_diff = c.apply(diff);
  const bool kernel_shift = numerics::norm2(c_diff) <= 1e-12 * (1.0 + numerics::norm2(diff));
  if (!kernel_shift && !is_delta_adjacent(beta, beta_prime, delta)) {
    throw std::invalid_argument("dp_ratio_check: inputs are not delta-adjacent");
  }

  // Left inverse (D^T D)^{-1} D^T recovers gamma from beta_sharp - C beta.
  const Matrix d = m.d_matrix();
  const Matrix left_inv = numerics::spd_inverse(d.transpose() * d) * d.transpose();
  // gamma' = gamma + left_inv * C (beta - beta'); precompute the shift.
  const std::vector<double> shift = left_inv.apply(c_diff);

  SplitRng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    SplitRng trial_rng = rng.split(static_cast<std::uint64_t>(trial));
    double log_ratio = 0.0;
    for (int k = 0; k < t; ++k) {
      const double g = trial_rng.laplace(0.0, v);
      const double g_prime = g + shift[static_cast<std::size_t>(k)];
      log_ratio += (std::abs(g_prime) - std::abs(g)) / v;
    }
    worst = std::max(worst, std::abs(log_ratio));
  }
  return worst;
}

AdversaryObservations make_observations(const MechanismMatrices& m, std::span<const double> beta,
                                        double sigma2, int l, std::uint64_t seed) {
  if (l < 1) throw std::invalid_argument("make_observations: need l >= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("make_observations: sigma2 must be positive");
  AdversaryObservations obs;
  obs.mechanism = m;
  obs.noise_sigma2 = sigma2;
  const int t = mech_t(m);
  SplitRng rng(seed);
  for (int run = 0; run < l; ++run) {
    SplitRng run_rng = rng.split(static_cast<std::uint64_t>(run));
    std::vector<double> gamma(static_cast<std::size_t>(t));
    for (int k = 0; k < t; ++k) {
      gamma[static_cast<std::size_t>(k)] = run_rng.gaussian(0.0, std::sqrt(sigma2));
    }
    obs.samples.push_back(mechanism::apply_linear(m, beta, gamma));
  }
  return obs;
}

AdversaryObservations make_noiseless_observations(const MechanismMatrices& m,
                                                  std::span<const double> beta, double sigma2,
                                                  int l) {
  if (l < 1) throw std::invalid_argument("make_noiseless_observations: need l >= 1");
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("make_noiseless_observations: sigma2 must be positive");
  }
  AdversaryObservations obs;
  obs.mechanism = m;
  obs.noise_sigma2 = sigma2;
  const std::vector<double> zeros(static_cast<std::size_t>(mech_t(m)), 0.0);
  obs.samples.assign(static_cast<std::size_t>(l), mechanism::apply_linear(m, beta, zeros));
  return obs;
}

MleResult mle_estimate(const AdversaryObservations& obs) {
  check_observations(obs);
  const int n = mech_n(obs.mechanism);
  const KktPieces k = mle_system(obs);
  const numerics::KktResult sol = numerics::solve_kkt(k.h, k.a_eq, k.grad_rhs, k.eq_rhs);

  MleResult res;
  res.point = sol.solution;
  res.unique = sol.unique;
  res.stationarity_residual = stationarity_residual(k, sol.solution, sol.multipliers.front());
  res.constraint_residual = std::abs(numerics::sum(sol.solution) - k.eq_rhs.front());

  // Solution-set directions: kernel of the full saddle matrix, restricted to
  // the beta block (the multiplier component of any kernel vector is zero).
  Matrix saddle(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) saddle(i, j) = k.h(i, j);
    saddle(i, n) = 1.0;
    saddle(n, i) = 1.0;
  }
  const Matrix kb = numerics::kernel_basis(saddle);
  res.directions = Matrix(n, kb.cols());
  for (int j = 0; j < kb.cols(); ++j) {
    for (int i = 0; i < n; ++i) res.directions(i, j) = kb(i, j);
  }
  return res;
}

MapResult map_estimate(const AdversaryObservations& obs, const PriorModel& prior) {
  check_observations(obs);
  const int n = mech_n(obs.mechanism);
  if (static_cast<int>(prior.mu_beta.size()) != n || prior.lambda_beta.rows() != n ||
      prior.lambda_beta.cols() != n) {
    throw std::invalid_argument("map_estimate: prior dimension mismatch");
  }
  Matrix prior_precision;
  try {
    prior_precision = numerics::spd_inverse(prior.lambda_beta);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("map_estimate: prior covariance must be SPD");
  }

  KktPieces k = mle_system(obs);
  k.h = k.h + prior_precision;
  const std::vector<double> prior_pull = prior_precision.apply(prior.mu_beta);
  for (int i = 0; i < n; ++i) k.grad_rhs[static_cast<std::size_t>(i)] += prior_pull[static_cast<std::size_t>(i)];

  const numerics::KktResult sol = numerics::solve_kkt(k.h, k.a_eq, k.grad_rhs, k.eq_rhs);
  if (!sol.unique) throw std::logic_error("map_estimate: E_map unexpectedly singular");

  MapResult res;
  res.point = sol.solution;
  res.stationarity_residual = stationarity_residual(k, sol.solution, sol.multipliers.front());
  res.constraint_residual = std::abs(numerics::sum(sol.solution) - k.eq_rhs.front());
  return res;
}

double resilience_metric(const TradeoffParams& p, double rho_gamma, double sigma_gamma2) {
  const double gap = p.mu_tilde - rho_gamma;
  return 2.0 * p.p_d * (1.0 - p.p_d) * (gap * gap + p.sigma_tilde2 + sigma_gamma2);
}

double privacy_metric(const TradeoffParams& p, double sigma_gamma2) {
  constexpr double two_pi_e = 2.0 * 3.141592653589793238462643383279502884 * 2.718281828459045235360287471352662498;
  return 0.5 * std::log(two_pi_e) - 0.5 * std::log(1.0 / p.sigma_tilde2 + 1.0 / sigma_gamma2);
}

TradeoffResult tradeoff_optimize(const TradeoffParams& p) {
  if (!(p.p_d > 0.0 && p.p_d < 1.0) || !(p.nu > 0.0) || !(p.sigma_tilde2 > 0.0)) {
    throw std::invalid_argument("tradeoff_optimize: invalid parameters");
  }
  const double sigma_tilde = std::sqrt(p.sigma_tilde2);
  TradeoffResult res;
  res.rho_gamma = p.mu_tilde;
  res.sigma_gamma2 =
      0.5 * sigma_tilde *
      (std::sqrt(p.sigma_tilde2 + p.nu / (p.p_d * (1.0 - p.p_d))) - sigma_tilde);
  res.u_r = resilience_metric(p, res.rho_gamma, res.sigma_gamma2);
  res.u_p = privacy_metric(p, res.sigma_gamma2);
  return res;
}

TradeoffResult tradeoff_optimize_for_family(const TradeoffParams& p,
                                            const std::string& noise_family) {
  if (noise_family != "gaussian") {
    throw std::invalid_argument(
        "tradeoff_optimize: the entropy metric assumes Gaussian noise; got " + noise_family);
  }
  return tradeoff_optimize(p);
}

std::string adversary_report_to_json(const AdversaryReport& report, int indent) {
  nlohmann::json doc{
      {"epsilon_bound", report.epsilon_bound},
      {"max_log_ratio", report.max_log_ratio},
      {"mle",
       {{"point", report.mle.point},
        {"kernel_dim", report.mle.directions.cols()},
        {"unique", report.mle.unique},
        {"residuals",
         {{"stationarity", report.mle.stationarity_residual},
          {"sum_constraint", report.mle.constraint_residual}}}}},
      {"map",
       {{"point", report.map.point},
        {"residuals",
         {{"stationarity", report.map.stationarity_residual},
          {"sum_constraint", report.map.constraint_residual}}}}}};
  return doc.dump(indent);
}

}  // namespace ppsc::privacy
