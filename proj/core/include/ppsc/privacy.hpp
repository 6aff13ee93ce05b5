#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppsc/matrix.hpp"
#include "ppsc/symbolic.hpp"

namespace ppsc::privacy {

using symbolic::GraphicalModel;
using symbolic::MechanismMatrices;

struct DpParams {
  double delta = 0.0;    // adjacency radius
  double v = 0.0;        // Laplace scale (variance 2 v^2)
  double epsilon = 0.0;  // budget
};

// Budget bundled with the parameters that produced it.
DpParams dp_params(const MechanismMatrices& m, const GraphicalModel& gm, double delta, double v);

struct NonIdentifiabilityResult {
  numerics::Matrix certificate;  // orthonormal basis of ker(C)
  bool ok = false;               // rank(C) < n
};

// Non-identifiability certificate: any eta in ker(C) shifts the input without changing
// the output law.
NonIdentifiabilityResult check_non_identifiability(const MechanismMatrices& m);

// epsilon bound  delta sqrt(n-1) Delta(G) / (v |sigma_m(D^T D)|)  for i.i.d.
// Laplace noise of variance 2 v^2 under delta-adjacency.
double dp_budget(const MechanismMatrices& m, const GraphicalModel& gm, double delta, double v);

// Adjacency test used by dp_ratio_check: the inputs differ in at most one
// coordinate by at most delta. Pairs whose difference lies in ker(C) are also
// accepted (the density ratio is identically one for them).
bool is_delta_adjacent(std::span<const double> beta, std::span<const double> beta_prime,
                       double delta);

// Samples `trials` mechanism outputs for beta, recovers the noise vector via
// the left inverse (D^T D)^{-1} D^T, and evaluates the Laplace density ratio
// against beta_prime. Returns the max |log ratio|; the budget contract is
// max <= dp_budget for the same (delta, v). Throws on non-adjacent inputs.
double dp_ratio_check(const MechanismMatrices& m, std::span<const double> beta,
                      std::span<const double> beta_prime, double delta, double v, int trials,
                      std::uint64_t seed);

// l output vectors from independent runs of one mechanism on one beta,
// assuming gamma ~ N(0, sigma2) per step.
struct AdversaryObservations {
  std::vector<std::vector<double>> samples;
  MechanismMatrices mechanism;
  double noise_sigma2 = 0.0;
};

AdversaryObservations make_observations(const MechanismMatrices& m, std::span<const double> beta,
                                        double sigma2, int l, std::uint64_t seed);

// Observations at the zero-noise limit (gamma = 0): every sample equals
// C beta exactly while the adversary still weights by sigma2.
AdversaryObservations make_noiseless_observations(const MechanismMatrices& m,
                                                  std::span<const double> beta, double sigma2,
                                                  int l);

struct PriorModel {
  std::vector<double> mu_beta;
  numerics::Matrix lambda_beta;  // SPD covariance
};

struct MleResult {
  std::vector<double> point;      // minimum-norm KKT solution
  numerics::Matrix directions;    // orthonormal basis of the solution-set directions
  bool unique = false;            // always false for tree-run mechanisms
  double stationarity_residual = 0.0;
  double constraint_residual = 0.0;
};

// Constrained maximum-likelihood estimate: minimizes the Lambda_*-weighted
// residual over the sum hyperplane 1^T beta = 1^T y_1. The solution set is an
// affine subspace; `directions` spans ker(C) ∩ {1^T eta = 0}.
MleResult mle_estimate(const AdversaryObservations& obs);

struct MapResult {
  std::vector<double> point;
  double stationarity_residual = 0.0;
  double constraint_residual = 0.0;
};

// Maximum a-posteriori estimate under a Gaussian prior; unique by the SPD
// prior term.
MapResult map_estimate(const AdversaryObservations& obs, const PriorModel& prior);

struct TradeoffParams {
  double p_d = 0.0;          // per-step dropout probability
  double nu = 0.0;           // privacy weight
  double mu_tilde = 0.0;     // transmitted-state mean
  double sigma_tilde2 = 0.0; // transmitted-state variance
};

struct TradeoffResult {
  double rho_gamma = 0.0;
  double sigma_gamma2 = 0.0;
  double u_r = 0.0;
  double u_p = 0.0;
};

// Resilience metric 2 p_d (1-p_d) ((mu~ - rho)^2 + sigma~^2 + s) and privacy
// metric (conditional entropy) at a candidate noise design.
double resilience_metric(const TradeoffParams& p, double rho_gamma, double sigma_gamma2);
double privacy_metric(const TradeoffParams& p, double sigma_gamma2);

// Closed-form minimizer of U_R - nu U_P over (rho_gamma, sigma_gamma2),
// with the metric values at the optimum. The entropy term assumes Gaussian
// state and noise.
TradeoffResult tradeoff_optimize(const TradeoffParams& p);

// Guarded variant for callers holding a NoiseModel: refuses non-Gaussian
// families instead of silently reusing the Gaussian entropy formula.
TradeoffResult tradeoff_optimize_for_family(const TradeoffParams& p,
                                            const std::string& noise_family);

struct AdversaryReport {
  double epsilon_bound = 0.0;
  double max_log_ratio = 0.0;
  MleResult mle;
  MapResult map;
};

std::string adversary_report_to_json(const AdversaryReport& report, int indent = -1);

}  // namespace ppsc::privacy
