#include "fairmarket/matching.hpp"

#include <limits>

#include "fairmarket/errors.hpp"

namespace fm {

std::vector<std::size_t> min_cost_matching(const Matrix& cost, double* total_cost) {
  const std::size_t n = cost.rows();
  if (cost.cols() != n)
    raise(ErrorCode::DimensionMismatch, "matching cost matrix must be square");
  if (n == 0) {
    if (total_cost) *total_cost = 0.0;
    return {};
  }

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; p[j] holds the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    row_to_col[p[j] - 1] = j - 1;
    total += cost(p[j] - 1, j - 1);
  }
  if (total_cost) *total_cost = total;
  return row_to_col;
}

}  // namespace fm
