#include "fairmarket/eg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fairmarket/errors.hpp"
#include "fairmarket/flow.hpp"
#include "fairmarket/rng.hpp"

namespace fm {

namespace {

constexpr double kPriceFloor = 1e-30;

double max_residual(const Residuals& r) {
  return std::max({r.clearing, r.budget, r.bang_per_buck});
}

void fill_utilities(const MarketInstance& market, EquilibriumSolution& sol) {
  sol.utilities.resize(market.n);
  sol.utility_prices.resize(market.n);
  for (std::size_t i = 0; i < market.n; ++i) {
    sol.utilities[i] = dot(market.valuations.row(i), sol.allocation.row(i));
    sol.utility_prices[i] =
        sol.utilities[i] > 0.0 ? market.budgets[i] / sol.utilities[i] : 0.0;
  }
}

// Rebuilds the allocation from utility prices: prices from the elementwise
// max, support restricted to near-argmax pairs, quantities from a
// transportation max-flow. Gives exact supports and clearing when the betas
// are accurate; returns false when no saturating flow exists even after
// widening the support slack.
bool purify(const MarketInstance& market, const std::vector<double>& beta,
            double verification_tol, EquilibriumSolution& out) {
  const std::size_t n = market.n, m = market.m;
  for (double b : beta)
    if (!(b > 0.0)) return false;

  std::vector<double> prices(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      p = std::max(p, beta[i] * market.valuations(i, j));
    prices[j] = p;
  }
  const double total_budget =
      std::accumulate(market.budgets.begin(), market.budgets.end(), 0.0);
  double total_value = 0.0;
  for (std::size_t j = 0; j < m; ++j) total_value += prices[j] * market.supplies[j];
  if (!(total_value > 0.0)) return false;
  const double scale = total_budget / total_value;
  for (double& p : prices) p *= scale;
  std::vector<double> scaled_beta(beta);
  for (double& b : scaled_beta) b *= scale;

  std::vector<double> sink_caps(m);
  for (std::size_t j = 0; j < m; ++j) sink_caps[j] = prices[j] * market.supplies[j];

  for (double kappa = 1e-9; kappa <= verification_tol / 2 + 1e-18; kappa *= 10.0) {
    std::vector<std::vector<std::size_t>> edges(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (scaled_beta[i] * market.valuations(i, j) >= (1.0 - kappa) * prices[j])
          edges[i].push_back(j);
      }
    }
    BipartiteFlowResult flow = bipartite_max_flow(market.budgets, sink_caps, edges);
    if (total_budget - flow.value > 1e-9 * std::max(1.0, total_budget)) continue;

    out.allocation = Matrix(n, m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double spend = 0.0;
      for (std::size_t j = 0; j < m; ++j) spend += flow.flow(i, j);
      if (!(spend > 0.0)) return false;
      const double fix = market.budgets[i] / spend;  // exact budget exhaustion
      for (std::size_t j = 0; j < m; ++j) {
        if (flow.flow(i, j) > 0.0)
          out.allocation(i, j) = flow.flow(i, j) * fix / prices[j];
      }
    }
    out.prices = prices;
    fill_utilities(market, out);
    return true;
  }
  return false;
}

}  // namespace

EquilibriumSolution solve_eg(const MarketInstance& market, const SolverConfig& config) {
  const std::size_t n = market.n, m = market.m;
  if (config.max_iterations < 1 || !(config.convergence_tol > 0.0) ||
      !(config.verification_tol > 0.0))
    raise(ErrorCode::InvalidArgument, "solver config out of range");

  // b_ij: buyer i's bid on item j; rows always sum to the budget.
  Matrix bids(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = market.valuations.row(i);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) row_sum += v[j];
    for (std::size_t j = 0; j < m; ++j)
      bids(i, j) = market.budgets[i] * v[j] / row_sum;
  }

  std::vector<double> prices(m);
  Matrix x(n, m);
  std::vector<double> utilities(n);
  auto forward = [&]() {
    for (std::size_t j = 0; j < m; ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += bids(i, j);
      prices[j] = std::max(total / market.supplies[j], kPriceFloor);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double u = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        x(i, j) = bids(i, j) / prices[j];
        u += market.valuations(i, j) * x(i, j);
      }
      utilities[i] = u;
    }
  };

  bool converged = false;
  std::size_t iterations = 0;
  for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
    forward();
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double bi = market.budgets[i];
      for (std::size_t j = 0; j < m; ++j) {
        const double next = bi * market.valuations(i, j) * x(i, j) / utilities[i];
        delta = std::max(delta, std::abs(next - bids(i, j)) / bi);
        bids(i, j) = next;
      }
    }
    iterations = iter;
    if (delta < config.convergence_tol) {
      converged = true;
      break;
    }
  }
  forward();  // state consistent with the final bids

  EquilibriumSolution raw;
  raw.allocation = x;
  raw.prices = prices;
  raw.iterations = iterations;
  fill_utilities(market, raw);
  VerifyReport raw_report = verify_equilibrium(market, raw, config.verification_tol);

  EquilibriumSolution refined;
  bool have_refined = purify(market, raw.utility_prices, config.verification_tol, refined);
  VerifyReport refined_report;
  if (have_refined) {
    refined.iterations = iterations;
    refined_report = verify_equilibrium(market, refined, config.verification_tol);
  }

  EquilibriumSolution* chosen = &raw;
  VerifyReport* chosen_report = &raw_report;
  if (have_refined &&
      max_residual(refined_report.residuals) <= max_residual(raw_report.residuals)) {
    chosen = &refined;
    chosen_report = &refined_report;
  }
  chosen->residuals = chosen_report->residuals;

  if (!converged)
    throw NotConvergedError(
        "proportional response did not settle in " +
            std::to_string(config.max_iterations) + " iterations",
        max_residual(chosen_report->residuals), iterations);
  if (!chosen_report->pass)
    throw NotConvergedError(
        "converged bids failed verification at tol " +
            std::to_string(config.verification_tol),
        max_residual(chosen_report->residuals), iterations);
  return *chosen;
}

double eg_objective(const MarketInstance& market, const Allocation& allocation) {
  if (allocation.rows() != market.n || allocation.cols() != market.m)
    raise(ErrorCode::DimensionMismatch, "allocation does not match market");
  double objective = 0.0;
  for (std::size_t i = 0; i < market.n; ++i) {
    const double u = dot(market.valuations.row(i), allocation.row(i));
    if (!(u > 0.0))
      raise(ErrorCode::ZeroUtility,
            "buyer " + std::to_string(i) + " has utility " + std::to_string(u));
    objective += market.budgets[i] * std::log(u);
  }
  return objective;
}

namespace {

// Euclidean projection of one item column onto {z >= 0, sum z <= supply}.
void project_column(std::vector<double>& z, double supply) {
  double positive_sum = 0.0;
  for (double& e : z) {
    if (e < 0.0) e = 0.0;
    positive_sum += e;
  }
  if (positive_sum <= supply) return;
  std::vector<double> sorted(z);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - supply) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  for (double& e : z) e = std::max(0.0, e - theta);
}

double objective_or_neg_inf(const MarketInstance& market, const Matrix& x) {
  double objective = 0.0;
  for (std::size_t i = 0; i < market.n; ++i) {
    const double u = dot(market.valuations.row(i), x.row(i));
    if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
    objective += market.budgets[i] * std::log(u);
  }
  return objective;
}

}  // namespace

EquilibriumSolution brute_force_eg(const MarketInstance& market, std::size_t restarts,
                                   std::uint64_t seed) {
  const std::size_t n = market.n, m = market.m;
  if (n * m > 6)
    raise(ErrorCode::OracleScaleExceeded,
          "oracle accepts n*m <= 6, got " + std::to_string(n * m));

  Rng rng(seed);
  Matrix best;
  double best_objective = -std::numeric_limits<double>::infinity();
  std::size_t total_steps = 0;

  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(restarts, 1); ++attempt) {
    Matrix x(n, m);
    if (attempt == 0) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
          x(i, j) = market.supplies[j] / static_cast<double>(n);
    } else {
      for (std::size_t j = 0; j < m; ++j) {
        double total = 0.0;
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) total += (w[i] = rng.uniform(0.1, 1.0));
        const double fill = rng.uniform(0.6, 1.0);
        for (std::size_t i = 0; i < n; ++i)
          x(i, j) = fill * market.supplies[j] * w[i] / total;
      }
    }

    double objective = objective_or_neg_inf(market, x);
    double step = 0.1;
    std::size_t flat = 0;
    for (std::size_t it = 0; it < 60000 && flat < 200 && step > 1e-18; ++it) {
      ++total_steps;
      Matrix trial = x;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = dot(market.valuations.row(i), x.row(i));
        for (std::size_t j = 0; j < m; ++j)
          trial(i, j) += step * market.budgets[i] * market.valuations(i, j) / u;
      }
      std::vector<double> column(n);
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = trial(i, j);
        project_column(column, market.supplies[j]);
        for (std::size_t i = 0; i < n; ++i) trial(i, j) = column[i];
      }
      const double trial_objective = objective_or_neg_inf(market, trial);
      if (trial_objective > objective + 1e-15 * (1.0 + std::abs(objective))) {
        x = trial;
        objective = trial_objective;
        step *= 1.2;
        flat = 0;
      } else {
        step *= 0.5;
        ++flat;
      }
    }
    if (objective > best_objective) {
      best_objective = objective;
      best = x;
    }
  }

  EquilibriumSolution sol;
  sol.allocation = best;
  sol.iterations = total_steps;
  fill_utilities(market, sol);
  sol.prices.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      sol.prices[j] = std::max(
          sol.prices[j], market.budgets[i] * market.valuations(i, j) / sol.utilities[i]);
    }
  }
  sol.residuals = verify_equilibrium(market, sol).residuals;
  return sol;
}

std::vector<double> prices_from_utility_prices(const MarketInstance& market,
                                               const std::vector<double>& beta) {
  if (beta.size() != market.n)
    raise(ErrorCode::DimensionMismatch, "beta length does not match buyers");
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (!(beta[i] > 0.0))
      raise(ErrorCode::InvalidArgument,
            "utility price " + std::to_string(i) + " must be strictly positive");
  std::vector<double> prices(market.m, 0.0);
  for (std::size_t j = 0; j < market.m; ++j)
    for (std::size_t i = 0; i < market.n; ++i)
      prices[j] = std::max(prices[j], beta[i] * market.valuations(i, j));
  return prices;
}

FeasibilityWitness is_budget_feasible(const MarketInstance& market,
                                      const std::vector<double>& beta, double tol) {
  std::vector<double> prices = prices_from_utility_prices(market, beta);
  const std::size_t n = market.n, m = market.m;

  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (beta[i] * market.valuations(i, j) >= (1.0 - tol) * prices[j])
        edges[i].push_back(j);
    }
  }
  std::vector<double> sink_caps(m);
  double target = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    target += (sink_caps[j] = prices[j] * market.supplies[j]);

  BipartiteFlowResult flow = bipartite_max_flow(market.budgets, sink_caps, edges);

  FeasibilityWitness witness;
  witness.feasible = (target - flow.value) <= tol * std::max(1.0, target);
  if (witness.feasible) {
    witness.allocation = Matrix(n, m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (flow.flow(i, j) > 0.0)
          witness.allocation(i, j) = flow.flow(i, j) / prices[j];
  }
  return witness;
}

std::vector<double> elementwise_max_beta(const std::vector<double>& b1,
                                         const std::vector<double>& b2) {
  if (b1.size() != b2.size())
    raise(ErrorCode::DimensionMismatch, "utility price vectors differ in length");
  std::vector<double> out(b1.size());
  for (std::size_t i = 0; i < b1.size(); ++i) out[i] = std::max(b1[i], b2[i]);
  return out;
}

}  // namespace fm
