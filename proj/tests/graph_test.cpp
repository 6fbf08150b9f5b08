#include <gtest/gtest.h>

#include "pcnsim/graph.hpp"

using namespace pcnsim;

namespace {
Amount u(std::int64_t x) { return Amount::from_units(x); }
}

TEST(Graph, AddChannelStoresDirectionalBalances) {
  Graph g(3);
  const auto id = g.add_channel(2, 0, u(7), u(3));
  const Channel& c = g.channel(id);
  EXPECT_EQ(c.a, 0u);
  EXPECT_EQ(c.b, 2u);
  EXPECT_EQ(g.available(2, id), u(7));
  EXPECT_EQ(g.available(0, id), u(3));
  EXPECT_EQ(c.capacity(), u(10));
}

TEST(Graph, RejectsBadChannels) {
  Graph g(3);
  g.add_channel(0, 1);
  EXPECT_THROW(g.add_channel(1, 0), InvalidParameters);
  EXPECT_THROW(g.add_channel(1, 1), InvalidParameters);
  EXPECT_THROW(g.add_channel(0, 3), InvalidParameters);
  EXPECT_THROW(g.add_channel(0, 2, Amount::from_micros(-1)), InvalidParameters);
}

TEST(Graph, NeighborsSortedAndLookup) {
  Graph g(5);
  g.add_channel(0, 4);
  g.add_channel(0, 2);
  g.add_channel(0, 3);
  std::vector<NodeId> ids;
  for (const auto& a : g.neighbors(0)) ids.push_back(a.node);
  EXPECT_EQ(ids, (std::vector<NodeId>{2, 3, 4}));
  EXPECT_TRUE(g.find_channel(3, 0).has_value());
  EXPECT_FALSE(g.find_channel(1, 0).has_value());
  EXPECT_FALSE(g.find_channel(9, 0).has_value());
}

TEST(Graph, LockSettleRelease) {
  Graph g(2);
  const auto id = g.add_channel(0, 1, u(10), u(0));
  Channel& c = g.channel(id);
  c.lock(Direction::forward, u(5));
  EXPECT_EQ(c.available(Direction::forward), u(5));
  c.settle(Direction::forward, u(5));
  EXPECT_EQ(c.balance[0], u(5));
  EXPECT_EQ(c.balance[1], u(5));
  EXPECT_EQ(c.locked[0], u(0));
  c.lock(Direction::backward, u(2));
  c.release(Direction::backward, u(2));
  EXPECT_EQ(c.balance[1], u(5));
  EXPECT_THROW(c.lock(Direction::forward, u(6)), InvariantViolation);
  EXPECT_THROW(c.release(Direction::forward, u(1)), InvariantViolation);
}

TEST(Graph, ConnectivityAndDistances) {
  Graph g(4);
  g.add_channel(0, 1);
  g.add_channel(1, 2);
  EXPECT_FALSE(g.connected());
  const auto d = g.hop_distances(0);
  EXPECT_EQ(d[2], 2u);
  EXPECT_EQ(d[3], Graph::kUnreachable);
  g.add_channel(3, 0);
  EXPECT_TRUE(g.connected());
}

TEST(Graph, EqualityCoversLocks) {
  Graph a(2), b(2);
  a.add_channel(0, 1, u(1), u(1));
  b.add_channel(0, 1, u(1), u(1));
  EXPECT_EQ(a, b);
  b.channel(0).lock(Direction::forward, u(1));
  EXPECT_FALSE(a == b);
}
