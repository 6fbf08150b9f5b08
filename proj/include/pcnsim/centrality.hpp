#pragma once

#include <vector>

#include "pcnsim/graph.hpp"

namespace pcnsim {

// Unnormalised betweenness over unordered pairs {s, r} with s != z != r,
// treating channels as unweighted undirected edges (Brandes' dependency
// accumulation, one BFS per source).
inline std::vector<double> betweenness_centrality(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> score(n, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::int64_t> dist(n);
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<NodeId> queue(n);

  for (NodeId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const NodeId v = queue[head++];
      order.push_back(v);
      for (const auto& adj : g.neighbors(v)) {
        const NodeId w = adj.node;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (const auto& adj : g.neighbors(w)) {
        const NodeId v = adj.node;
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) score[w] += delta[w];
    }
  }
  // Each unordered pair was counted once from each endpoint.
  for (auto& x : score) x *= 0.5;
  return score;
}

}  // namespace pcnsim
