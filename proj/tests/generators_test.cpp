#include <gtest/gtest.h>

#include <algorithm>

#include "pcnsim/generators.hpp"

using namespace pcnsim;

TEST(ScaleFree, EdgeCountAndConnectivity) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Graph g = generate_scale_free(500, 2, seed);
    EXPECT_EQ(g.node_count(), 500u);
    EXPECT_EQ(g.channel_count(), 2u * (500 - 2));
    EXPECT_TRUE(g.connected());
  }
}

TEST(ScaleFree, HeavyTailedDegrees) {
  const Graph g = generate_scale_free(5000, 2, 9);
  std::size_t max_degree = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) max_degree = std::max(max_degree, g.degree(v));
  EXPECT_GT(max_degree, 50u);
}

TEST(ScaleFree, Deterministic) {
  EXPECT_EQ(generate_scale_free(300, 3, 42), generate_scale_free(300, 3, 42));
  EXPECT_FALSE(generate_scale_free(300, 3, 42) == generate_scale_free(300, 3, 43));
}

TEST(ScaleFree, RejectsBadParameters) {
  EXPECT_THROW(generate_scale_free(10, 0, 1), InvalidParameters);
  EXPECT_THROW(generate_scale_free(3, 3, 1), InvalidParameters);
}

TEST(SmallWorld, RingWithoutShortcuts) {
  const Graph g = generate_small_world(10, 2, 0.0, 5);
  EXPECT_EQ(g.channel_count(), 10u);
  for (NodeId v = 0; v < 10; ++v) EXPECT_EQ(g.degree(v), 2u);
}

TEST(SmallWorld, RegularRingAtZeroProbability) {
  const Graph g = generate_small_world(200, 6, 0.0, 5);
  for (NodeId v = 0; v < 200; ++v) EXPECT_EQ(g.degree(v), 6u);
}

TEST(SmallWorld, HomogeneousDegrees) {
  const Graph g = generate_small_world(1000, 20, 0.01, 3);
  std::vector<std::size_t> deg;
  for (NodeId v = 0; v < g.node_count(); ++v) deg.push_back(g.degree(v));
  std::sort(deg.begin(), deg.end());
  const double median = static_cast<double>(deg[deg.size() / 2]);
  EXPECT_LT(static_cast<double>(deg.back()) / median, 2.0);
  EXPECT_GE(deg.front(), 20u);
  EXPECT_TRUE(g.connected());
}

TEST(SmallWorld, ShortcutsAreAdded) {
  const Graph g = generate_small_world(1000, 4, 0.5, 1);
  EXPECT_GT(g.channel_count(), 2000u);
}

TEST(SmallWorld, RejectsBadParameters) {
  EXPECT_THROW(generate_small_world(10, 3, 0.1, 1), InvalidParameters);
  EXPECT_THROW(generate_small_world(10, 10, 0.1, 1), InvalidParameters);
  EXPECT_THROW(generate_small_world(10, 2, 1.5, 1), InvalidParameters);
}
