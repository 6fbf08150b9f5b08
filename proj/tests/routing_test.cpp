#include <gtest/gtest.h>

#include <map>

#include "pcnsim/routing.hpp"
#include "test_support.hpp"

using namespace pcnsim;

using testing_support::matrix_max_flow;

TEST(Split, SharesSumToValue) {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto value = Amount::from_micros(static_cast<std::int64_t>(testing_support::draw(rng, 1, 5'000'000)));
    const std::size_t n = testing_support::draw(rng, 1, 5);
    const auto shares = split_payment(value, n, rng);
    ASSERT_EQ(shares.size(), n);
    Amount sum;
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_EQ(shares[k].tree, k);
      EXPECT_GE(shares[k].amount, Amount{});
      sum += shares[k].amount;
    }
    ASSERT_EQ(sum, value);
  }
}

TEST(Split, SharesHaveEqualMeans) {
  Rng rng(5);
  std::vector<double> sum(3, 0.0);
  constexpr int kDraws = 30000;
  for (int i = 0; i < kDraws; ++i) {
    const auto shares = split_payment(Amount::from_units(3), 3, rng);
    for (std::size_t k = 0; k < 3; ++k) sum[k] += shares[k].amount.to_double();
  }
  for (double s : sum) EXPECT_NEAR(s / kDraws, 1.0, 0.02);
}

TEST(Split, RejectsBadInput) {
  Rng rng(1);
  EXPECT_THROW(split_payment(Amount{}, 3, rng), InvalidParameters);
  EXPECT_THROW(split_payment(Amount::from_units(1), 0, rng), InvalidParameters);
}

TEST(NextHop, PicksClosestFundedNeighbour) {
  const auto big = Amount::from_units(10);
  Graph g(5);
  g.add_channel(0, 1, big, big);
  g.add_channel(0, 2, big, big);
  g.add_channel(1, 3, big, big);
  g.add_channel(2, 4, big, big);
  const auto shortcut = g.add_channel(3, 4, big, big);
  const auto set = build_trees(g, 1, 1);
  const auto& t = set[0];
  ASSERT_EQ(t.root, 0u);
  const NodeId from = 3, other = 4;
  // The shortcut joins two leaves of different branches: tree distance 4, one hop.
  ASSERT_FALSE(t.has_edge(shortcut, g));
  ASSERT_EQ(t.distance(from, other), 4u);
  auto hop = next_hop_sm(g, t, from, t.coords[other], Amount::from_units(1));
  ASSERT_TRUE(hop);
  EXPECT_EQ(hop->node, other);
  g.channel(shortcut).lock(g.channel(shortcut).direction_from(from), big);
  hop = next_hop_sm(g, t, from, t.coords[other], Amount::from_units(1));
  ASSERT_TRUE(hop);
  EXPECT_EQ(hop->node, t.parent[from]);
  hop = next_hop_sm(g, t, from, t.coords[other], Amount::from_units(1),
                    [&](ChannelId id) { return id != t.parent_channel[from]; });
  EXPECT_FALSE(hop);
}

TEST(NextHop, StuckAtLocalMinimum) {
  Graph g(3);
  g.add_channel(0, 1, Amount::from_units(1), Amount::from_units(1));
  g.add_channel(1, 2, Amount::from_units(1), Amount::from_units(1));
  const auto set = build_trees(g, 1, 1);
  EXPECT_FALSE(next_hop_sm(g, set[0], 0, set[0].coords[2], Amount::from_units(2)));
}

TEST(MaxFlow, DiamondExample) {
  Graph g(4);
  g.add_channel(0, 1, Amount::from_units(3), Amount{});
  g.add_channel(0, 2, Amount::from_units(2), Amount{});
  g.add_channel(1, 3, Amount::from_units(2), Amount{});
  g.add_channel(2, 3, Amount::from_units(5), Amount{});
  g.add_channel(1, 2, Amount::from_units(1), Amount{});
  EXPECT_EQ(max_flow_value(g, 0, 3), Amount::from_units(5));
  EXPECT_EQ(max_flow_value(g, 3, 0), Amount{});
  MaxFlowWorkspace ws;
  EXPECT_EQ(plan_max_flow(g, 0, 3, Amount::from_units(4), ws).total, Amount::from_units(4));
}

TEST(MaxFlow, AgreesWithMatrixOracleAndDecomposes) {
  Rng rng(99);
  MaxFlowWorkspace ws;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = testing_support::draw(rng, 2, 30);
    const Graph g = testing_support::random_connected(rng, n, testing_support::draw(rng, 0, 2 * n), 0, 9);
    const auto s = static_cast<NodeId>(testing_support::draw(rng, 0, n - 1));
    auto t = static_cast<NodeId>(testing_support::draw(rng, 0, n - 1));
    if (s == t) t = static_cast<NodeId>((t + 1) % n);
    const std::int64_t expected = matrix_max_flow(g, s, t);
    const auto plan = plan_max_flow(g, s, t, Amount::from_micros(INT64_MAX / 4), ws);
    ASSERT_EQ(plan.total.micros(), expected) << "trial " << trial;

    std::map<std::pair<ChannelId, NodeId>, std::int64_t> used;
    Amount sum;
    for (const auto& p : plan.paths) {
      ASSERT_EQ(p.nodes.front(), s);
      ASSERT_EQ(p.nodes.back(), t);
      ASSERT_EQ(p.channels.size() + 1, p.nodes.size());
      ASSERT_TRUE(p.amount.positive());
      for (std::size_t i = 0; i < p.channels.size(); ++i) {
        ASSERT_EQ(g.find_channel(p.nodes[i], p.nodes[i + 1]), p.channels[i]);
        used[{p.channels[i], p.nodes[i]}] += p.amount.micros();
      }
      sum += p.amount;
    }
    EXPECT_EQ(sum, plan.total);
    for (const auto& [key, amount] : used) EXPECT_LE(amount, g.available(key.second, key.first).micros());
  }
}

TEST(MaxFlow, FilterExcludesChannels) {
  Graph g(3);
  const auto direct = g.add_channel(0, 2, Amount::from_units(4), Amount{});
  g.add_channel(0, 1, Amount::from_units(1), Amount{});
  g.add_channel(1, 2, Amount::from_units(1), Amount{});
  MaxFlowWorkspace ws;
  const auto plan =
      plan_max_flow(g, 0, 2, Amount::from_units(10), ws, [&](ChannelId id) { return id != direct; });
  EXPECT_EQ(plan.total, Amount::from_units(1));
}
