#include "fairmarket/flow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "fairmarket/errors.hpp"

namespace fm {

namespace {

struct Edge {
  std::size_t to;
  double cap;
  std::size_t rev;  // index of the reverse edge in graph[to]
};

}  // namespace

BipartiteFlowResult bipartite_max_flow(const std::vector<double>& source_caps,
                                       const std::vector<double>& sink_caps,
                                       const std::vector<std::vector<std::size_t>>& edges) {
  const std::size_t n = source_caps.size();
  const std::size_t m = sink_caps.size();
  if (edges.size() != n)
    raise(ErrorCode::DimensionMismatch, "flow edge list does not match sources");

  const std::size_t source = 0, sink = n + m + 1;
  std::vector<std::vector<Edge>> graph(n + m + 2);
  auto add_edge = [&](std::size_t a, std::size_t b, double cap) {
    graph[a].push_back({b, cap, graph[b].size()});
    graph[b].push_back({a, 0.0, graph[a].size() - 1});
  };

  double cap_scale = 0.0;
  for (double c : source_caps) cap_scale = std::max(cap_scale, c);
  for (double c : sink_caps) cap_scale = std::max(cap_scale, c);
  const double eps = 1e-12 * std::max(1.0, cap_scale);
  const double inf = std::numeric_limits<double>::infinity();

  // Record where buyer->item edges live so flows can be read back.
  Matrix edge_index(n, m, -1.0);
  for (std::size_t i = 0; i < n; ++i) add_edge(source, 1 + i, source_caps[i]);
  for (std::size_t j = 0; j < m; ++j) add_edge(1 + n + j, sink, sink_caps[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : edges[i]) {
      if (j >= m) raise(ErrorCode::IndexOutOfRange, "flow edge item index");
      edge_index(i, j) = static_cast<double>(graph[1 + i].size());
      add_edge(1 + i, 1 + n + j, inf);
    }
  }

  BipartiteFlowResult result;
  std::vector<std::ptrdiff_t> prev_node(graph.size());
  std::vector<std::size_t> prev_edge(graph.size());

  while (true) {
    std::fill(prev_node.begin(), prev_node.end(), -1);
    prev_node[source] = static_cast<std::ptrdiff_t>(source);
    std::deque<std::size_t> queue{source};
    while (!queue.empty() && prev_node[sink] < 0) {
      const std::size_t at = queue.front();
      queue.pop_front();
      for (std::size_t e = 0; e < graph[at].size(); ++e) {
        const Edge& edge = graph[at][e];
        if (edge.cap > eps && prev_node[edge.to] < 0) {
          prev_node[edge.to] = static_cast<std::ptrdiff_t>(at);
          prev_edge[edge.to] = e;
          queue.push_back(edge.to);
        }
      }
    }
    if (prev_node[sink] < 0) break;

    double bottleneck = inf;
    for (std::size_t at = sink; at != source;) {
      const std::size_t from = static_cast<std::size_t>(prev_node[at]);
      bottleneck = std::min(bottleneck, graph[from][prev_edge[at]].cap);
      at = from;
    }
    for (std::size_t at = sink; at != source;) {
      const std::size_t from = static_cast<std::size_t>(prev_node[at]);
      Edge& fwd = graph[from][prev_edge[at]];
      fwd.cap -= bottleneck;
      graph[at][fwd.rev].cap += bottleneck;
      at = from;
    }
    result.value += bottleneck;
  }

  result.flow = Matrix(n, m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double idx = edge_index(i, j);
      if (idx < 0) continue;
      const Edge& fwd = graph[1 + i][static_cast<std::size_t>(idx)];
      result.flow(i, j) = graph[fwd.to][fwd.rev].cap;  // flow = reverse capacity
    }
  }
  return result;
}

}  // namespace fm
