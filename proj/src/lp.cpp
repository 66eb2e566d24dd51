#include "fairmarket/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairmarket/errors.hpp"

namespace fm {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;

// Tableau layout: rows 0..k-1 are constraints, row k is the (maximization)
// objective stored negated so a pivot step is uniform; the last column is
// the right-hand side. Columns: structural vars, then slack/surplus, then
// artificials.
struct Tableau {
  std::size_t k, total_cols;          // constraint rows, columns incl. rhs
  std::vector<double> t;              // (k+1) x (total_cols)
  std::vector<std::size_t> basis;     // basic column per row
  std::size_t artificial_begin = 0;   // columns >= this are artificial

  double& at(std::size_t r, std::size_t c) { return t[r * total_cols + c]; }
  double at(std::size_t r, std::size_t c) const { return t[r * total_cols + c]; }
  std::size_t rhs() const { return total_cols - 1; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double piv = at(pr, pc);
    for (std::size_t c = 0; c < total_cols; ++c) at(pr, c) /= piv;
    for (std::size_t r = 0; r <= k; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < total_cols; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  }

  // Returns false when the current objective row has no improving column.
  // allow(c) masks out columns that may not enter (artificials in phase 2).
  template <class Allow>
  LpStatus run(Allow allow, std::size_t max_pivots) {
    double best_obj = -std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    bool bland = false;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      // entering column
      std::size_t pc = total_cols;
      if (bland) {
        for (std::size_t c = 0; c + 1 < total_cols; ++c) {
          if (allow(c) && at(k, c) < -kCostEps) {
            pc = c;
            break;
          }
        }
      } else {
        double best = -kCostEps;
        for (std::size_t c = 0; c + 1 < total_cols; ++c) {
          if (allow(c) && at(k, c) < best) {
            best = at(k, c);
            pc = c;
          }
        }
      }
      if (pc == total_cols) return LpStatus::Optimal;

      // ratio test, smallest index on ties
      std::size_t pr = k + 1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < k; ++r) {
        const double a = at(r, pc);
        if (a > kPivotEps) {
          const double ratio = at(r, rhs()) / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (pr == k + 1 || basis[r] < basis[pr]))) {
            best_ratio = ratio;
            pr = r;
          }
        }
      }
      if (pr == k + 1) return LpStatus::Unbounded;
      pivot(pr, pc);

      const double obj = -at(k, rhs());
      if (obj > best_obj + 1e-12) {
        best_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall > 64) {
        bland = true;  // degenerate stretch: switch to Bland's rule
      }
    }
    return LpStatus::IterationLimit;
  }
};

}  // namespace

LpResult simplex_maximize(const Matrix& A, const std::vector<double>& b,
                          const std::vector<double>& c) {
  const std::size_t k = A.rows();
  const std::size_t nvars = A.cols();
  if (b.size() != k || c.size() != nvars)
    raise(ErrorCode::DimensionMismatch, "simplex input shapes disagree");

  std::size_t n_artificial = 0;
  for (double bi : b) n_artificial += (bi < 0.0);

  Tableau tab;
  tab.k = k;
  tab.artificial_begin = nvars + k;
  tab.total_cols = nvars + k + n_artificial + 1;
  tab.t.assign((k + 1) * tab.total_cols, 0.0);
  tab.basis.assign(k, 0);

  std::size_t art = tab.artificial_begin;
  for (std::size_t r = 0; r < k; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nvars; ++j) tab.at(r, j) = sign * A(r, j);
    tab.at(r, nvars + r) = sign;  // slack (surplus when the row was negated)
    tab.at(r, tab.rhs()) = sign * b[r];
    if (b[r] < 0.0) {
      tab.at(r, art) = 1.0;
      tab.basis[r] = art++;
    } else {
      tab.basis[r] = nvars + r;
    }
  }

  const std::size_t max_pivots = 200 * (k + nvars) + 2000;

  if (n_artificial > 0) {
    // Phase 1: minimize the artificial sum, i.e. maximize its negative.
    for (std::size_t r = 0; r < k; ++r) {
      if (tab.basis[r] >= tab.artificial_begin) {
        for (std::size_t cidx = 0; cidx < tab.total_cols; ++cidx)
          tab.at(k, cidx) -= tab.at(r, cidx);
      }
    }
    LpStatus s1 = tab.run([](std::size_t) { return true; }, max_pivots);
    if (s1 == LpStatus::IterationLimit) return {LpStatus::IterationLimit, 0.0, {}};
    if (-tab.at(k, tab.rhs()) > 1e-7) return {LpStatus::Infeasible, 0.0, {}};
    // Drive any artificial still basic (at value ~0) out of the basis.
    for (std::size_t r = 0; r < k; ++r) {
      if (tab.basis[r] < tab.artificial_begin) continue;
      std::size_t pc = tab.total_cols;
      for (std::size_t cidx = 0; cidx < tab.artificial_begin; ++cidx) {
        if (std::abs(tab.at(r, cidx)) > kPivotEps) {
          pc = cidx;
          break;
        }
      }
      if (pc != tab.total_cols) tab.pivot(r, pc);
      // otherwise the row is redundant; the artificial stays basic at zero
    }
  }

  // Phase 2: install the real objective and price it out through the basis.
  for (std::size_t cidx = 0; cidx < tab.total_cols; ++cidx) tab.at(k, cidx) = 0.0;
  for (std::size_t j = 0; j < nvars; ++j) tab.at(k, j) = -c[j];
  for (std::size_t r = 0; r < k; ++r) {
    const double coeff = tab.at(k, tab.basis[r]);
    if (coeff == 0.0) continue;
    for (std::size_t cidx = 0; cidx < tab.total_cols; ++cidx)
      tab.at(k, cidx) -= coeff * tab.at(r, cidx);
  }
  const std::size_t art_begin = tab.artificial_begin;
  LpStatus s2 = tab.run([art_begin](std::size_t cidx) { return cidx < art_begin; },
                        max_pivots);
  if (s2 == LpStatus::Unbounded) return {LpStatus::Unbounded, 0.0, {}};
  if (s2 == LpStatus::IterationLimit) return {LpStatus::IterationLimit, 0.0, {}};

  LpResult result;
  result.status = LpStatus::Optimal;
  result.x.assign(nvars, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    if (tab.basis[r] < nvars) result.x[tab.basis[r]] = tab.at(r, tab.rhs());
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < nvars; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace fm
