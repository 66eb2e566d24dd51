#pragma once

#include <vector>

#include "fairmarket/matrix.hpp"

namespace fm {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Maximizes c . x subject to A x <= b, x >= 0 (b entries may be negative).
/// Dense two-phase tableau simplex; Dantzig pricing with a switch to Bland's
/// rule after a stall, which prevents cycling on degenerate bases.
LpResult simplex_maximize(const Matrix& A, const std::vector<double>& b,
                          const std::vector<double>& c);

}  // namespace fm
