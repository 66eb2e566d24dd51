#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fairmarket/market.hpp"

namespace fm {

/// Full metric suite for one allocation. Per-buyer regret and envy are
/// stored as nonnegative magnitudes; loss-sign rendering is a presentation
/// concern left to callers.
struct MetricsReport {
  std::vector<double> regret;       // |shortfall| / demand utility, per buyer
  std::vector<double> envy;         // normalized envy in [0, 1], per buyer
  std::vector<double> scaled_envy;  // budget-scaled variant, per buyer
  double pareto_gap = 1.0;          // achieved / best Pareto-improving welfare
  double geometric_mean_gap = 1.0;  // vs. the reference allocation
  double efficiency_gap = 1.0;      // vs. the reference allocation
  bool has_groups = false;
  std::pair<double, double> group_utilities{0.0, 0.0};
  double utility_disparity = 0.0;   // |U_1 - U_0|
};

/// Normalized demand shortfall (v_i . x_i - d_i) / d_i where d_i is the
/// achieved utility of buyer i's demand at these prices. Nonpositive by
/// demand optimality; 0 at an exact equilibrium.
double regret(const MarketInstance& market, std::size_t buyer,
              const Allocation& allocation, const std::vector<double>& prices,
              double budget);

/// (max utility of another bundle - own utility) / max utility of another
/// bundle, clamped below at 0. A single buyer has envy 0.
double envy(const MarketInstance& market, std::size_t buyer,
            const Allocation& allocation);

/// Like envy, but each foreign bundle's value is discounted by the budget
/// ratio B_i / B_i' before comparison; identical to envy at equal budgets.
double scaled_envy(const MarketInstance& market, std::size_t buyer,
                   const Allocation& allocation, const std::vector<double>& budgets);

/// Welfare ratio against the best Pareto-improving allocation, found by the
/// internal simplex on: max total welfare s.t. nobody drops below their
/// current utility, supplies respected. Exactly 1 iff no improvement exists.
double pareto_gap(const MarketInstance& market, const Allocation& allocation);

/// Ratio of geometric-mean utilities, computed in log space.
double geometric_mean_gap(const MarketInstance& market, const Allocation& allocation,
                          const Allocation& reference);

/// Ratio of social welfares.
double efficiency_gap(const MarketInstance& market, const Allocation& allocation,
                      const Allocation& reference);

/// Mean utility per protected class; both classes must be non-empty.
std::pair<double, double> group_utilities(const MarketInstance& market,
                                          const Allocation& allocation);

/// Max over matched cross-class pairs of the infinity-norm bundle
/// difference; 0 certifies identical empirical allocation distributions
/// under the pairing. The matching must be a group-0 <-> group-1 bijection.
double allocation_distribution_distance(
    const MarketInstance& market, const Allocation& allocation,
    const std::vector<std::pair<std::size_t, std::size_t>>& matching);

MetricsReport compute_metrics(const MarketInstance& market,
                              const Allocation& allocation,
                              const std::vector<double>& prices,
                              const Allocation& reference);

std::string metrics_to_json(const MetricsReport& report);

}  // namespace fm
