#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairmarket/matrix.hpp"

namespace fm {

// Default absolute tolerance for feasibility and equilibrium residuals in
// budget-normalized markets.
inline constexpr double kDefaultTol = 1e-6;

/// A linear Fisher market: n buyers with budgets of pseudo-currency and
/// per-item valuations, m divisible items with finite supply, and a binary
/// protected-class label per buyer.
struct MarketInstance {
  std::size_t n = 0;  // buyers
  std::size_t m = 0;  // items
  Matrix valuations;            // n x m, strictly positive, <= max_valuation
  std::vector<double> budgets;  // n, positive
  std::vector<double> supplies; // m, positive
  std::vector<int> groups;      // n, each 0 or 1
  double max_valuation = 0.0;   // upper bound on every valuation entry
  std::vector<std::string> buyer_ids;  // size n; synthesized when not supplied

  std::size_t group_size(int z) const {
    std::size_t c = 0;
    for (int g : groups) c += (g == z);
    return c;
  }
  std::vector<std::size_t> group_members(int z) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i] == z) out.push_back(i);
    return out;
  }
};

using Allocation = Matrix;  // n x m, nonnegative, column sums within supply

struct Residuals {
  double clearing = 0.0;       // max_j |sum_i x_ij - s_j| over priced items
  double budget = 0.0;         // max_i |p . x_i - B_i|
  double bang_per_buck = 0.0;  // max relative argmax slack over the support
};

/// Equilibrium bundle: allocation, prices, and the per-buyer utility prices
/// beta_i = B_i / u_i that tie them together.
struct EquilibriumSolution {
  Allocation allocation;              // n x m
  std::vector<double> prices;         // m
  std::vector<double> utility_prices; // n, beta_i
  std::vector<double> utilities;      // n, u_i = v_i . x_i
  Residuals residuals;
  std::size_t iterations = 0;
};

struct VerifyReport {
  Residuals residuals;
  double tol = kDefaultTol;
  bool pass = false;
};

struct DemandResult {
  std::vector<double> bundle;  // length m
  double utility = 0.0;        // the unique achieved utility level
};

/// Convenience constructor: fills buyer ids and, when max_valuation is not
/// given (<= 0), tightens it to the largest entry.
MarketInstance make_market(Matrix valuations, std::vector<double> budgets,
                           std::vector<double> supplies, std::vector<int> groups,
                           double max_valuation = 0.0);

/// Checks every MarketInstance invariant and returns the instance unchanged.
/// Throws DimensionMismatch, NonPositiveValuation (with indices),
/// NonPositiveBudget, NonPositiveSupply or InvalidGroupLabel.
MarketInstance validate_market(MarketInstance raw);

/// Utility-maximizing affordable bundle for one buyer at the given prices,
/// capped per item at the market supply. Spends greedily by descending
/// bang-per-buck v_ij / p_j, breaking ties toward the lower item index.
/// Throws UnboundedDemand when an item with positive valuation has price zero.
DemandResult demand(const MarketInstance& market, std::size_t buyer,
                    const std::vector<double>& prices, double budget);

/// Equilibrium audit at absolute tolerance tol: (a) priced items clear and
/// unpriced items stay within supply, (b) every budget is exhausted,
/// (c) allocated items are bang-per-buck maximizers (relative slack <= tol;
/// entries spending less than tol * B_i are treated as numerically zero).
VerifyReport verify_equilibrium(const MarketInstance& market,
                                const Allocation& allocation,
                                const std::vector<double>& prices,
                                double tol = kDefaultTol);
VerifyReport verify_equilibrium(const MarketInstance& market,
                                const EquilibriumSolution& solution,
                                double tol = kDefaultTol);

// --- JSON / file interchange ------------------------------------------------
// Market files: { "supplies": [..], "buyers": [ { "id": .., "group": 0|1,
// "budget": .., "valuations": [..] } ] }. Parsing is strict: unknown keys are
// rejected with ParseError.

MarketInstance market_from_json(const std::string& text);
std::string market_to_json(const MarketInstance& market);
MarketInstance load_market(const std::string& path);

EquilibriumSolution equilibrium_from_json(const std::string& text);
std::string equilibrium_to_json(const EquilibriumSolution& solution);

}  // namespace fm
