#include <gtest/gtest.h>

#include <functional>

#include "pcnsim/centrality.hpp"
#include "test_support.hpp"

using namespace pcnsim;

namespace {

// Enumerates every shortest path of every unordered pair explicitly and
// credits each interior node with its share of that pair's paths.
std::vector<double> brute_force_betweenness(const Graph& g) {
  const std::size_t n = g.node_count();
  constexpr int kInf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (NodeId v = 0; v < n; ++v) d[v][v] = 0;
  for (const auto& c : g.channels()) d[c.a][c.b] = d[c.b][c.a] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

  std::vector<double> score(n, 0.0);
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId r = s + 1; r < n; ++r) {
      if (d[s][r] >= kInf) continue;
      std::vector<std::vector<NodeId>> paths;
      std::vector<NodeId> cur{s};
      std::function<void()> walk = [&] {
        const NodeId u = cur.back();
        if (u == r) {
          paths.push_back(cur);
          return;
        }
        for (const auto& adj : g.neighbors(u)) {
          if (d[s][adj.node] == d[s][u] + 1 && d[adj.node][r] == d[u][r] - 1) {
            cur.push_back(adj.node);
            walk();
            cur.pop_back();
          }
        }
      };
      walk();
      for (const auto& p : paths)
        for (std::size_t i = 1; i + 1 < p.size(); ++i) score[p[i]] += 1.0 / static_cast<double>(paths.size());
    }
  }
  return score;
}

}  // namespace

TEST(Betweenness, StarCentre) {
  Graph g(5);
  for (NodeId v = 1; v < 5; ++v) g.add_channel(0, v);
  const auto b = betweenness_centrality(g);
  EXPECT_DOUBLE_EQ(b[0], 6.0);
  for (NodeId v = 1; v < 5; ++v) EXPECT_DOUBLE_EQ(b[v], 0.0);
}

TEST(Betweenness, PathGraph) {
  Graph g(4);
  g.add_channel(0, 1);
  g.add_channel(1, 2);
  g.add_channel(2, 3);
  const auto b = betweenness_centrality(g);
  EXPECT_DOUBLE_EQ(b[1], 2.0);
  EXPECT_DOUBLE_EQ(b[2], 2.0);
  EXPECT_DOUBLE_EQ(b[0], 0.0);
}

TEST(Betweenness, SquareSplitsEvenly) {
  Graph g(4);
  g.add_channel(0, 1);
  g.add_channel(1, 2);
  g.add_channel(2, 3);
  g.add_channel(3, 0);
  for (double x : betweenness_centrality(g)) EXPECT_DOUBLE_EQ(x, 0.5);
}

TEST(Betweenness, MatchesPathEnumerationOnRandomGraphs) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = testing_support::draw(rng, 2, 10);
    const Graph g = testing_support::random_connected(rng, n, testing_support::draw(rng, 0, 2 * n));
    const auto fast = betweenness_centrality(g);
    const auto slow = brute_force_betweenness(g);
    for (NodeId v = 0; v < n; ++v) ASSERT_NEAR(fast[v], slow[v], 1e-9) << "trial " << trial << " node " << v;
  }
}
