#pragma once

#include <cstdint>
#include <vector>

#include "fairmarket/market.hpp"

namespace fm {

struct SolverConfig {
  std::size_t max_iterations = 10000;
  double convergence_tol = 1e-8;    // max relative bid change per iteration
  double verification_tol = 1e-6;   // residual gate on the returned solution
  std::uint64_t seed = 0;           // randomized initialization, if any
};

/// Solves max_x sum_i B_i log(v_i . x_i) s.t. column sums <= supplies by
/// proportional-response dynamics on the bid matrix, then re-verifies the
/// fixed point. Throws NotConvergedError when bids have not settled within
/// max_iterations or the result misses verification_tol.
EquilibriumSolution solve_eg(const MarketInstance& market,
                             const SolverConfig& config = {});

/// The budget-weighted log welfare sum_i B_i log(v_i . x_i).
/// Throws ZeroUtility when some buyer's utility is not positive.
double eg_objective(const MarketInstance& market, const Allocation& allocation);

/// Independent oracle for desk-checking solve_eg on tiny instances
/// (n * m <= 6): projected-gradient ascent on the allocation polytope with
/// `restarts` random restarts, prices recovered from the utility gradients
/// p_j = max_i B_i v_ij / u_i.
EquilibriumSolution brute_force_eg(const MarketInstance& market,
                                   std::size_t restarts = 8,
                                   std::uint64_t seed = 1);

/// p_j = max_i beta_i v_ij. Beta must be strictly positive.
std::vector<double> prices_from_utility_prices(const MarketInstance& market,
                                               const std::vector<double>& beta);

struct FeasibilityWitness {
  bool feasible = false;
  Allocation allocation;  // meaningful only when feasible
};

/// Decides whether utility prices beta admit an allocation supported on the
/// per-item argmax buyers that clears every item within the buyers' budgets
/// (transportation feasibility via max-flow). Returns a witness when one
/// exists.
FeasibilityWitness is_budget_feasible(const MarketInstance& market,
                                      const std::vector<double>& beta,
                                      double tol = 1e-7);

std::vector<double> elementwise_max_beta(const std::vector<double>& b1,
                                         const std::vector<double>& b2);

}  // namespace fm
