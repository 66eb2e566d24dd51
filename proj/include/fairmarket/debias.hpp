#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairmarket/eg.hpp"
#include "fairmarket/market.hpp"

namespace fm {

struct DebiasConfig {
  double lambda = 1e4;            // MMD penalty weight
  double kernel_bandwidth = 0.0;  // <= 0 selects the median heuristic
  double learning_rate = 1e-3;
  std::size_t steps = 2000;
  std::uint64_t seed = 0;
  double match_tolerance = 0.0;   // pairs at most this far apart keep the
                                  // group-0 row instead of the midpoint
  double positivity_floor = 0.01;
};

struct DebiasResult {
  Matrix v_hat;  // debiased valuations; matched pairs hold identical rows
  std::vector<std::pair<std::size_t, std::size_t>> matching;  // (group0, group1)
  double mmd_final = 0.0;          // MMD^2 after descent, before the snap
  double frobenius_distance = 0.0; // ||V - V_hat||_F
  double one_inf_distance = 0.0;   // max_i ||v_i - v_hat_i||_1
  double bandwidth = 0.0;          // kernel bandwidth actually used
};

/// Biased V-statistic estimate of the squared maximum mean discrepancy
/// between two samples of row vectors under the Gaussian kernel
/// k(x, y) = exp(-||x - y||^2 / (2 bandwidth^2)). Zero iff the samples are
/// identical multisets.
double mmd_squared(const Matrix& sample_a, const Matrix& sample_b, double bandwidth);

/// Median pairwise Euclidean distance across all rows (1.0 when degenerate).
double median_heuristic_bandwidth(const Matrix& rows);

/// Penalized objective ||V - V_hat||_F^2 + lambda * MMD^2(group rows) and its
/// analytic gradient, exposed for finite-difference checking.
double debias_objective(const MarketInstance& market, const Matrix& v_hat,
                        double lambda, double bandwidth);
Matrix debias_gradient(const MarketInstance& market, const Matrix& v_hat,
                       double lambda, double bandwidth);

/// Three phases: gradient descent on the penalized objective, minimum-cost
/// cross-class matching of the descended rows (squared-distance costs), and
/// a midpoint snap that makes matched rows bitwise identical (floored at the
/// positivity floor). Requires balanced non-empty groups.
DebiasResult debias_valuations(const MarketInstance& market, const DebiasConfig& config);

struct EqeeiResult {
  EquilibriumSolution solution_vhat;  // CEEI of the debiased market
  Allocation pooled_allocation;       // after per-pair pooling & even split
  DebiasResult debias;
};

/// Debias, solve CEEI at equal budgets under the debiased valuations, then
/// pool each matched pair's bundles and split them evenly, making the
/// per-class allocation distributions coincide exactly.
EqeeiResult eqeei(const MarketInstance& market, const DebiasConfig& config,
                  const SolverConfig& solver_config = {});

std::string debias_to_json(const DebiasResult& result);

}  // namespace fm
