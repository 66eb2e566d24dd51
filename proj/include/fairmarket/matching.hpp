#pragma once

#include <cstddef>
#include <vector>

#include "fairmarket/matrix.hpp"

namespace fm {

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// potentials, O(n^3)). Returns the column assigned to each row; total cost
/// is written to *total_cost when given.
std::vector<std::size_t> min_cost_matching(const Matrix& cost,
                                           double* total_cost = nullptr);

}  // namespace fm
