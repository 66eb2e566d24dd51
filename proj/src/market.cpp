#include "fairmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fairmarket/errors.hpp"

namespace fm {

using nlohmann::json;

MarketInstance make_market(Matrix valuations, std::vector<double> budgets,
                           std::vector<double> supplies, std::vector<int> groups,
                           double max_valuation) {
  MarketInstance market;
  market.n = valuations.rows();
  market.m = valuations.cols();
  market.valuations = std::move(valuations);
  market.budgets = std::move(budgets);
  market.supplies = std::move(supplies);
  market.groups = std::move(groups);
  if (max_valuation > 0.0) {
    market.max_valuation = max_valuation;
  } else {
    double v = 0.0;
    for (double e : market.valuations.data()) v = std::max(v, e);
    market.max_valuation = v;
  }
  market.buyer_ids.resize(market.n);
  for (std::size_t i = 0; i < market.n; ++i)
    market.buyer_ids[i] = "b" + std::to_string(i);
  return validate_market(std::move(market));
}

MarketInstance validate_market(MarketInstance raw) {
  const std::size_t n = raw.n, m = raw.m;
  if (raw.valuations.rows() != n || raw.valuations.cols() != m)
    raise(ErrorCode::DimensionMismatch, "valuations are " +
              std::to_string(raw.valuations.rows()) + "x" +
              std::to_string(raw.valuations.cols()) + ", expected " +
              std::to_string(n) + "x" + std::to_string(m));
  if (raw.budgets.size() != n)
    raise(ErrorCode::DimensionMismatch,
          "budgets has length " + std::to_string(raw.budgets.size()) +
              " for n=" + std::to_string(n));
  if (raw.supplies.size() != m)
    raise(ErrorCode::DimensionMismatch,
          "supplies has length " + std::to_string(raw.supplies.size()) +
              " for m=" + std::to_string(m));
  if (raw.groups.size() != n)
    raise(ErrorCode::DimensionMismatch,
          "groups has length " + std::to_string(raw.groups.size()) +
              " for n=" + std::to_string(n));
  if (!raw.buyer_ids.empty() && raw.buyer_ids.size() != n)
    raise(ErrorCode::DimensionMismatch, "buyer_ids has length " +
              std::to_string(raw.buyer_ids.size()) + " for n=" + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = raw.valuations(i, j);
      if (!(v > 0.0) || !std::isfinite(v))
        raise(ErrorCode::NonPositiveValuation,
              "valuation at (" + std::to_string(i) + "," + std::to_string(j) +
                  ") is " + std::to_string(v));
      if (v > raw.max_valuation)
        raise(ErrorCode::NonPositiveValuation,
              "valuation at (" + std::to_string(i) + "," + std::to_string(j) +
                  ") exceeds max_valuation " + std::to_string(raw.max_valuation));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(raw.budgets[i] > 0.0) || !std::isfinite(raw.budgets[i]))
      raise(ErrorCode::NonPositiveBudget,
            "budget of buyer " + std::to_string(i) + " is " +
                std::to_string(raw.budgets[i]));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(raw.supplies[j] > 0.0) || !std::isfinite(raw.supplies[j]))
      raise(ErrorCode::NonPositiveSupply,
            "supply of item " + std::to_string(j) + " is " +
                std::to_string(raw.supplies[j]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (raw.groups[i] != 0 && raw.groups[i] != 1)
      raise(ErrorCode::InvalidGroupLabel,
            "group of buyer " + std::to_string(i) + " is " +
                std::to_string(raw.groups[i]));
  }
  if (raw.buyer_ids.empty()) {
    raw.buyer_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) raw.buyer_ids[i] = "b" + std::to_string(i);
  }
  return raw;
}

DemandResult demand(const MarketInstance& market, std::size_t buyer,
                    const std::vector<double>& prices, double budget) {
  if (buyer >= market.n)
    raise(ErrorCode::IndexOutOfRange, "buyer " + std::to_string(buyer));
  if (prices.size() != market.m)
    raise(ErrorCode::DimensionMismatch, "prices has length " +
              std::to_string(prices.size()) + " for m=" + std::to_string(market.m));
  if (!(budget > 0.0))
    raise(ErrorCode::NonPositiveBudget, "demand budget is " + std::to_string(budget));

  const auto v = market.valuations.row(buyer);
  for (std::size_t j = 0; j < market.m; ++j) {
    if (v[j] > 0.0 && !(prices[j] > 0.0))
      raise(ErrorCode::UnboundedDemand,
            "item " + std::to_string(j) + " has positive valuation and price " +
                std::to_string(prices[j]));
  }

  // Greedy by bang-per-buck; ties resolved by the sort's stability toward
  // the lower item index.
  std::vector<std::size_t> order(market.m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return v[a] / prices[a] > v[b] / prices[b];
  });

  DemandResult result;
  result.bundle.assign(market.m, 0.0);
  double remaining = budget;
  for (std::size_t j : order) {
    if (remaining <= 0.0) break;
    const double take = std::min(market.supplies[j], remaining / prices[j]);
    if (take <= 0.0) continue;
    result.bundle[j] = take;
    result.utility += v[j] * take;
    remaining -= take * prices[j];
  }
  return result;
}

VerifyReport verify_equilibrium(const MarketInstance& market,
                                const Allocation& allocation,
                                const std::vector<double>& prices, double tol) {
  if (allocation.rows() != market.n || allocation.cols() != market.m ||
      prices.size() != market.m)
    raise(ErrorCode::DimensionMismatch, "allocation/prices do not match market");

  VerifyReport report;
  report.tol = tol;

  for (std::size_t j = 0; j < market.m; ++j) {
    double load = 0.0;
    for (std::size_t i = 0; i < market.n; ++i) load += allocation(i, j);
    const double s = market.supplies[j];
    if (prices[j] > tol) {
      report.residuals.clearing = std::max(report.residuals.clearing, std::abs(load - s));
    } else {
      report.residuals.clearing = std::max(report.residuals.clearing, load - s);
    }
  }

  for (std::size_t i = 0; i < market.n; ++i) {
    const double spend = dot(allocation.row(i), prices);
    report.residuals.budget =
        std::max(report.residuals.budget, std::abs(spend - market.budgets[i]));
  }

  for (std::size_t i = 0; i < market.n; ++i) {
    const auto v = market.valuations.row(i);
    double best = 0.0;
    bool free_valued_item = false;
    for (std::size_t j = 0; j < market.m; ++j) {
      if (prices[j] > 0.0) {
        best = std::max(best, v[j] / prices[j]);
      } else if (v[j] > 0.0) {
        free_valued_item = true;  // unbounded bang-per-buck: not an equilibrium
      }
    }
    if (free_valued_item) {
      report.residuals.bang_per_buck = std::max(report.residuals.bang_per_buck, 1.0);
      continue;
    }
    if (best <= 0.0) continue;
    for (std::size_t j = 0; j < market.m; ++j) {
      if (allocation(i, j) <= 0.0) continue;
      if (allocation(i, j) * prices[j] <= tol * market.budgets[i]) continue;
      const double slack = (best - v[j] / prices[j]) / best;
      report.residuals.bang_per_buck = std::max(report.residuals.bang_per_buck, slack);
    }
  }

  report.pass = report.residuals.clearing <= tol && report.residuals.budget <= tol &&
                report.residuals.bang_per_buck <= tol;
  return report;
}

VerifyReport verify_equilibrium(const MarketInstance& market,
                                const EquilibriumSolution& solution, double tol) {
  return verify_equilibrium(market, solution.allocation, solution.prices, tol);
}

// --- JSON --------------------------------------------------------------------

namespace {

void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                 const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      raise(ErrorCode::ParseError,
            std::string("unknown key \"") + key + "\" in " + where);
  }
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) raise(ErrorCode::ParseError, "invalid JSON");
  return j;
}

std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) raise(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) raise(ErrorCode::ParseError, std::string(what) + " must be numeric");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

MarketInstance market_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object()) raise(ErrorCode::ParseError, "market file must be a JSON object");
  expect_keys(j, {"supplies", "buyers"}, "market");
  if (!j.contains("supplies") || !j.contains("buyers"))
    raise(ErrorCode::ParseError, "market requires \"supplies\" and \"buyers\"");

  MarketInstance market;
  market.supplies = number_array(j["supplies"], "supplies");
  market.m = market.supplies.size();

  const json& buyers = j["buyers"];
  if (!buyers.is_array()) raise(ErrorCode::ParseError, "buyers must be an array");
  market.n = buyers.size();
  market.valuations = Matrix(market.n, market.m);
  market.budgets.resize(market.n);
  market.groups.resize(market.n);
  market.buyer_ids.resize(market.n);
  for (std::size_t i = 0; i < market.n; ++i) {
    const json& b = buyers[i];
    if (!b.is_object()) raise(ErrorCode::ParseError, "buyer entries must be objects");
    expect_keys(b, {"id", "group", "budget", "valuations"}, "buyer");
    for (const char* k : {"id", "group", "budget", "valuations"})
      if (!b.contains(k))
        raise(ErrorCode::ParseError, std::string("buyer missing \"") + k + "\"");
    if (!b["id"].is_string()) raise(ErrorCode::ParseError, "buyer id must be a string");
    if (!b["group"].is_number_integer())
      raise(ErrorCode::ParseError, "buyer group must be 0 or 1");
    if (!b["budget"].is_number())
      raise(ErrorCode::ParseError, "buyer budget must be numeric");
    market.buyer_ids[i] = b["id"].get<std::string>();
    market.groups[i] = b["group"].get<int>();
    market.budgets[i] = b["budget"].get<double>();
    std::vector<double> row = number_array(b["valuations"], "valuations");
    if (row.size() != market.m)
      raise(ErrorCode::DimensionMismatch,
            "buyer " + std::to_string(i) + " has " + std::to_string(row.size()) +
                " valuations for m=" + std::to_string(market.m));
    for (std::size_t jx = 0; jx < market.m; ++jx) market.valuations(i, jx) = row[jx];
  }
  double vmax = 0.0;
  for (double e : market.valuations.data()) vmax = std::max(vmax, e);
  market.max_valuation = vmax;
  return validate_market(std::move(market));
}

std::string market_to_json(const MarketInstance& market) {
  json buyers = json::array();
  for (std::size_t i = 0; i < market.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < market.m; ++j) row.push_back(market.valuations(i, j));
    buyers.push_back({{"id", market.buyer_ids[i]},
                      {"group", market.groups[i]},
                      {"budget", market.budgets[i]},
                      {"valuations", row}});
  }
  json j = {{"supplies", market.supplies}, {"buyers", buyers}};
  return j.dump(2) + "\n";
}

MarketInstance load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return market_from_json(ss.str());
}

EquilibriumSolution equilibrium_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object()) raise(ErrorCode::ParseError, "equilibrium must be a JSON object");
  for (const char* k : {"allocation", "prices", "utility_prices", "utilities"})
    if (!j.contains(k))
      raise(ErrorCode::ParseError, std::string("equilibrium missing \"") + k + "\"");
  EquilibriumSolution sol;
  const json& rows = j["allocation"];
  if (!rows.is_array()) raise(ErrorCode::ParseError, "allocation must be an array");
  std::vector<std::vector<double>> alloc;
  alloc.reserve(rows.size());
  for (const auto& r : rows) alloc.push_back(number_array(r, "allocation row"));
  for (const auto& r : alloc)
    if (r.size() != (alloc.empty() ? 0 : alloc.front().size()))
      raise(ErrorCode::ParseError, "allocation rows have unequal lengths");
  sol.allocation = Matrix::from_rows(alloc);
  sol.prices = number_array(j["prices"], "prices");
  sol.utility_prices = number_array(j["utility_prices"], "utility_prices");
  sol.utilities = number_array(j["utilities"], "utilities");
  if (j.contains("iterations")) sol.iterations = j["iterations"].get<std::size_t>();
  if (j.contains("residuals")) {
    const json& r = j["residuals"];
    sol.residuals.clearing = r.value("clearing", 0.0);
    sol.residuals.budget = r.value("budget", 0.0);
    sol.residuals.bang_per_buck = r.value("bang_per_buck", 0.0);
  }
  return sol;
}

std::string equilibrium_to_json(const EquilibriumSolution& solution) {
  json rows = json::array();
  for (std::size_t i = 0; i < solution.allocation.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < solution.allocation.cols(); ++j)
      row.push_back(solution.allocation(i, j));
    rows.push_back(row);
  }
  json j = {{"allocation", rows},
            {"prices", solution.prices},
            {"utility_prices", solution.utility_prices},
            {"utilities", solution.utilities},
            {"residuals",
             {{"clearing", solution.residuals.clearing},
              {"budget", solution.residuals.budget},
              {"bang_per_buck", solution.residuals.bang_per_buck}}},
            {"iterations", solution.iterations}};
  return j.dump(2) + "\n";
}

}  // namespace fm
