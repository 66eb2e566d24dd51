#include "fairmarket/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fairmarket/errors.hpp"
#include "fairmarket/lp.hpp"

namespace fm {

double regret(const MarketInstance& market, std::size_t buyer,
              const Allocation& allocation, const std::vector<double>& prices,
              double budget) {
  const DemandResult best = demand(market, buyer, prices, budget);
  if (!(best.utility > 0.0))
    raise(ErrorCode::ZeroDemandUtility,
          "buyer " + std::to_string(buyer) + " has zero demand utility");
  const double achieved = dot(market.valuations.row(buyer), allocation.row(buyer));
  return (achieved - best.utility) / best.utility;
}

namespace {

double envy_impl(const MarketInstance& market, std::size_t buyer,
                 const Allocation& allocation, const std::vector<double>* budgets) {
  if (buyer >= market.n)
    raise(ErrorCode::IndexOutOfRange, "buyer " + std::to_string(buyer));
  const auto v = market.valuations.row(buyer);
  const double own = dot(v, allocation.row(buyer));
  double most_envied = 0.0;
  bool has_other = false;
  for (std::size_t other = 0; other < market.n; ++other) {
    if (other == buyer) continue;
    has_other = true;
    double value = dot(v, allocation.row(other));
    if (budgets) value *= (*budgets)[buyer] / (*budgets)[other];
    most_envied = std::max(most_envied, value);
  }
  if (!has_other) return 0.0;
  if (most_envied <= own) return 0.0;  // envy-free toward everyone
  if (!(most_envied > 0.0))
    raise(ErrorCode::DegenerateAllocation,
          "every bundle is worthless to buyer " + std::to_string(buyer));
  return (most_envied - own) / most_envied;
}

}  // namespace

double envy(const MarketInstance& market, std::size_t buyer,
            const Allocation& allocation) {
  return envy_impl(market, buyer, allocation, nullptr);
}

double scaled_envy(const MarketInstance& market, std::size_t buyer,
                   const Allocation& allocation, const std::vector<double>& budgets) {
  if (budgets.size() != market.n)
    raise(ErrorCode::DimensionMismatch, "budgets length does not match buyers");
  return envy_impl(market, buyer, allocation, &budgets);
}

double pareto_gap(const MarketInstance& market, const Allocation& allocation) {
  const std::size_t n = market.n, m = market.m;
  if (allocation.rows() != n || allocation.cols() != m)
    raise(ErrorCode::DimensionMismatch, "allocation does not match market");

  double current_welfare = 0.0;
  std::vector<double> current_utility(n);
  for (std::size_t i = 0; i < n; ++i) {
    current_utility[i] = dot(market.valuations.row(i), allocation.row(i));
    if (!(current_utility[i] > 0.0))
      raise(ErrorCode::ZeroUtility, "buyer " + std::to_string(i) + " has no utility");
    current_welfare += current_utility[i];
  }

  // Variables y_ij flattened row-major. Rows: m supply constraints, then n
  // utility floors written as -v_i . y_i <= -u_i.
  Matrix A(m + n, n * m, 0.0);
  std::vector<double> b(m + n), c(n * m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) A(j, i * m + j) = 1.0;
    b[j] = market.supplies[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) A(m + i, i * m + j) = -market.valuations(i, j);
    b[m + i] = -current_utility[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c[i * m + j] = market.valuations(i, j);

  LpResult lp = simplex_maximize(A, b, c);
  if (lp.status != LpStatus::Optimal)
    raise(ErrorCode::LpInfeasible, "improvement LP did not reach an optimum");
  // The input allocation is itself feasible, so the optimum cannot be below
  // the current welfare (up to simplex tolerance).
  const double improved = std::max(lp.objective, current_welfare);
  return current_welfare / improved;
}

double geometric_mean_gap(const MarketInstance& market, const Allocation& allocation,
                          const Allocation& reference) {
  const std::size_t n = market.n;
  double log_mean = 0.0, log_mean_ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = dot(market.valuations.row(i), allocation.row(i));
    const double r = dot(market.valuations.row(i), reference.row(i));
    if (!(u > 0.0) || !(r > 0.0))
      raise(ErrorCode::ZeroUtility,
            "buyer " + std::to_string(i) + " has nonpositive utility");
    log_mean += std::log(u);
    log_mean_ref += std::log(r);
  }
  return std::exp((log_mean - log_mean_ref) / static_cast<double>(n));
}

double efficiency_gap(const MarketInstance& market, const Allocation& allocation,
                      const Allocation& reference) {
  double welfare = 0.0, reference_welfare = 0.0;
  for (std::size_t i = 0; i < market.n; ++i) {
    welfare += dot(market.valuations.row(i), allocation.row(i));
    reference_welfare += dot(market.valuations.row(i), reference.row(i));
  }
  if (!(reference_welfare > 0.0))
    raise(ErrorCode::ZeroReferenceWelfare, "reference social welfare is zero");
  return welfare / reference_welfare;
}

std::pair<double, double> group_utilities(const MarketInstance& market,
                                          const Allocation& allocation) {
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < market.n; ++i) {
    sum[market.groups[i]] += dot(market.valuations.row(i), allocation.row(i));
    ++count[market.groups[i]];
  }
  for (int z : {0, 1})
    if (count[z] == 0)
      raise(ErrorCode::EmptyGroup, "group " + std::to_string(z) + " is empty");
  return {sum[0] / static_cast<double>(count[0]),
          sum[1] / static_cast<double>(count[1])};
}

double allocation_distribution_distance(
    const MarketInstance& market, const Allocation& allocation,
    const std::vector<std::pair<std::size_t, std::size_t>>& matching) {
  const auto g0 = market.group_members(0);
  const auto g1 = market.group_members(1);
  if (matching.size() != g0.size() || g0.size() != g1.size())
    raise(ErrorCode::InvalidMatching,
          "matching must pair every group-0 buyer with one group-1 buyer");
  std::vector<char> seen0(market.n, 0), seen1(market.n, 0);
  for (const auto& [i0, i1] : matching) {
    if (i0 >= market.n || i1 >= market.n || market.groups[i0] != 0 ||
        market.groups[i1] != 1 || seen0[i0] || seen1[i1])
      raise(ErrorCode::InvalidMatching, "matching is not a cross-class bijection");
    seen0[i0] = seen1[i1] = 1;
  }
  double distance = 0.0;
  for (const auto& [i0, i1] : matching) {
    for (std::size_t j = 0; j < market.m; ++j)
      distance = std::max(distance, std::abs(allocation(i0, j) - allocation(i1, j)));
  }
  return distance;
}

MetricsReport compute_metrics(const MarketInstance& market,
                              const Allocation& allocation,
                              const std::vector<double>& prices,
                              const Allocation& reference) {
  MetricsReport report;
  report.regret.resize(market.n);
  report.envy.resize(market.n);
  report.scaled_envy.resize(market.n);
  for (std::size_t i = 0; i < market.n; ++i) {
    report.regret[i] =
        std::abs(regret(market, i, allocation, prices, market.budgets[i]));
    report.envy[i] = envy(market, i, allocation);
    report.scaled_envy[i] = scaled_envy(market, i, allocation, market.budgets);
  }
  report.pareto_gap = pareto_gap(market, allocation);
  report.geometric_mean_gap = geometric_mean_gap(market, allocation, reference);
  report.efficiency_gap = efficiency_gap(market, allocation, reference);
  report.has_groups = market.group_size(0) > 0 && market.group_size(1) > 0;
  if (report.has_groups) {
    report.group_utilities = group_utilities(market, allocation);
    report.utility_disparity =
        std::abs(report.group_utilities.second - report.group_utilities.first);
  }
  return report;
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j = {
      {"regret", report.regret},
      {"envy", report.envy},
      {"scaled_envy", report.scaled_envy},
      {"pareto_gap", report.pareto_gap},
      {"geometric_mean_gap", report.geometric_mean_gap},
      {"efficiency_gap", report.efficiency_gap},
      {"group_utilities",
       report.has_groups
           ? nlohmann::json::array(
                 {report.group_utilities.first, report.group_utilities.second})
           : nlohmann::json(nullptr)},
      {"utility_disparity", report.utility_disparity},
  };
  return j.dump(2) + "\n";
}

}  // namespace fm
