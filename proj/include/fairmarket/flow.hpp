#pragma once

#include <cstddef>
#include <vector>

#include "fairmarket/matrix.hpp"

namespace fm {

struct BipartiteFlowResult {
  double value = 0.0;
  Matrix flow;  // buyers x items; zero where there is no edge
};

/// Maximum flow on the transportation network
///   source -> buyer i (capacity source_caps[i])
///   buyer i -> item j (infinite, only where edges[i] lists j)
///   item j -> sink    (capacity sink_caps[j]).
/// Edmonds-Karp with an epsilon cutoff on residual capacities so that
/// floating-point dust cannot generate endless augmenting paths.
BipartiteFlowResult bipartite_max_flow(const std::vector<double>& source_caps,
                                       const std::vector<double>& sink_caps,
                                       const std::vector<std::vector<std::size_t>>& edges);

}  // namespace fm
