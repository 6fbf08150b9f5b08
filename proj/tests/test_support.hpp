#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"

namespace testing_support {

using pcnsim::Amount;
using pcnsim::Graph;
using pcnsim::NodeId;
using pcnsim::Rng;

inline std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random spanning tree plus `extra` random chords. Balances are uniform in
// [0, max_units] micro-unit multiples of one unit.
inline Graph random_connected(Rng& rng, std::size_t n, std::size_t extra, std::int64_t min_units = 0,
                              std::int64_t max_units = 0) {
  Graph g(n);
  auto bal = [&] {
    return Amount::from_units(static_cast<std::int64_t>(draw(rng, static_cast<std::size_t>(min_units),
                                                             static_cast<std::size_t>(max_units))));
  };
  for (NodeId v = 1; v < n; ++v) {
    const auto u = static_cast<NodeId>(draw(rng, 0, v - 1));
    const Amount x = bal(), y = bal();
    g.add_channel(u, v, x, y);
  }
  for (std::size_t i = 0; i < extra && n > 2; ++i) {
    const auto u = static_cast<NodeId>(draw(rng, 0, n - 1));
    const auto v = static_cast<NodeId>(draw(rng, 0, n - 1));
    if (u == v || g.find_channel(u, v)) continue;
    const Amount x = bal(), y = bal();
    g.add_channel(u, v, x, y);
  }
  return g;
}

// Plain augmenting-path max flow on a dense capacity matrix.
inline std::int64_t matrix_max_flow(const Graph& g, NodeId s, NodeId t) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::int64_t>> cap(n, std::vector<std::int64_t>(n, 0));
  for (const auto& c : g.channels()) {
    cap[c.a][c.b] = c.available(pcnsim::Direction::forward).micros();
    cap[c.b][c.a] = c.available(pcnsim::Direction::backward).micros();
  }
  std::int64_t flow = 0;
  for (;;) {
    std::vector<int> prev(n, -1);
    prev[s] = static_cast<int>(s);
    std::vector<NodeId> stack{s};
    while (!stack.empty() && prev[t] < 0) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v = 0; v < n; ++v)
        if (prev[v] < 0 && cap[u][v] > 0) {
          prev[v] = static_cast<int>(u);
          stack.push_back(v);
        }
    }
    if (prev[t] < 0) return flow;
    std::int64_t b = INT64_MAX;
    for (NodeId v = t; v != s; v = static_cast<NodeId>(prev[v])) b = std::min(b, cap[prev[v]][v]);
    for (NodeId v = t; v != s; v = static_cast<NodeId>(prev[v])) {
      cap[prev[v]][v] -= b;
      cap[v][prev[v]] += b;
    }
    flow += b;
  }
}

}  // namespace testing_support
