#include <gtest/gtest.h>

#include "pcnsim/ledger.hpp"
#include "test_support.hpp"

using namespace pcnsim;

namespace {
Amount u(std::int64_t x) { return Amount::from_units(x); }
}

TEST(Ledger, SettleMovesFunds) {
  Graph g(3);
  g.add_channel(0, 1, u(10), u(0));
  g.add_channel(1, 2, u(10), u(0));
  CollateralLedger l(g);
  EXPECT_EQ(l.lock(0, Direction::forward, u(4), 7), LockResult::ok);
  EXPECT_EQ(l.lock(1, Direction::forward, u(4), 7), LockResult::ok);
  EXPECT_EQ(g.total_locked(), u(8));
  l.settle(7);
  EXPECT_FALSE(l.has(7));
  EXPECT_EQ(g.available(0, 0), u(6));
  EXPECT_EQ(g.available(1, 0), u(4));
  EXPECT_EQ(g.total_locked(), u(0));
}

TEST(Ledger, RollbackRestoresExactly) {
  Graph g(3);
  g.add_channel(0, 1, u(10), u(2));
  g.add_channel(1, 2, u(10), u(0));
  const Graph before = g;
  CollateralLedger l(g);
  EXPECT_EQ(l.lock(0, Direction::forward, u(3), 1), LockResult::ok);
  EXPECT_EQ(l.lock(1, Direction::forward, u(3), 1), LockResult::ok);
  EXPECT_EQ(l.lock(1, Direction::backward, Amount::from_micros(1), 1), LockResult::insufficient);
  l.release_lock(1, 0);
  l.rollback(1);
  EXPECT_EQ(g, before);
}

TEST(Ledger, ConcurrentLocksOnSmallChannel) {
  Graph g(2);
  g.add_channel(0, 1, u(10), u(0));
  CollateralLedger l(g);
  EXPECT_EQ(l.lock(0, Direction::forward, u(6), 1), LockResult::ok);
  EXPECT_EQ(l.lock(0, Direction::forward, u(6), 2), LockResult::insufficient);
  EXPECT_EQ(g.available(0, 0), u(4));
}

TEST(Ledger, SlotLimit) {
  Graph g(2);
  g.add_channel(0, 1, u(100), u(100));
  CollateralLedger l(g, 2);
  EXPECT_EQ(l.lock(0, Direction::forward, u(1), 1), LockResult::ok);
  EXPECT_EQ(l.lock(0, Direction::backward, u(1), 2), LockResult::ok);
  EXPECT_EQ(l.holders(0), 2u);
  EXPECT_FALSE(l.admits(0, 3));
  EXPECT_EQ(l.lock(0, Direction::forward, u(1), 3), LockResult::busy);
  EXPECT_EQ(l.lock(0, Direction::forward, u(1), 1), LockResult::ok);
  EXPECT_EQ(l.holders(0), 2u);
  l.rollback(2);
  EXPECT_EQ(l.holders(0), 1u);
  EXPECT_EQ(l.lock(0, Direction::forward, u(1), 3), LockResult::ok);
  l.settle(1);
  l.settle(3);
  EXPECT_EQ(l.holders(0), 0u);
}

TEST(Ledger, Errors) {
  Graph g(2);
  g.add_channel(0, 1, u(1), u(1));
  CollateralLedger l(g);
  EXPECT_THROW(l.lock(0, Direction::forward, Amount{}, 1), InvalidParameters);
  EXPECT_THROW(l.rollback(9), InvalidParameters);
  EXPECT_THROW(l.settle(9), InvalidParameters);
  l.forget(9);
  l.lock(0, Direction::forward, u(1), 1);
  EXPECT_THROW(l.forget(1), InvariantViolation);
}

// Random interleavings of locks, partial settles, releases and rollbacks
// across many payments: total funds never change, locks never exceed
// balances, and the ledger's open locks account for every locked unit.
TEST(Ledger, ConservationUnderRandomInterleavings) {
  Rng rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = testing_support::random_connected(rng, 20, 25, 0, 20);
    const Amount total = g.total_balance();
    CollateralLedger l(g, trial % 2 ? 3 : 0);
    std::vector<TxId> live;
    TxId next = 0;
    for (int step = 0; step < 1000; ++step) {
      const auto op = testing_support::draw(rng, 0, 9);
      if (op < 5 || live.empty()) {
        TxId tx;
        if (live.empty() || rng() % 3 == 0) {
          tx = next++;
          live.push_back(tx);
        } else {
          tx = live[testing_support::draw(rng, 0, live.size() - 1)];
        }
        const auto id = static_cast<ChannelId>(testing_support::draw(rng, 0, g.channel_count() - 1));
        const auto d = rng() % 2 ? Direction::forward : Direction::backward;
        const auto amt = Amount::from_micros(static_cast<std::int64_t>(testing_support::draw(rng, 1, 8'000'000)));
        const Amount avail = g.channel(id).available(d);
        const bool admitted = l.admits(id, tx);
        const auto r = l.lock(id, d, amt, tx);
        if (!admitted) {
          ASSERT_EQ(r, LockResult::busy);
        } else {
          ASSERT_EQ(r == LockResult::ok, avail >= amt);
        }
      } else {
        const auto pos = testing_support::draw(rng, 0, live.size() - 1);
        const TxId tx = live[pos];
        if (l.has(tx)) {
          if (op < 7) {
            const auto locks = l.locks(tx);
            for (std::size_t i = 0; i < locks.size(); ++i)
              if (locks[i].open && rng() % 2) l.settle_lock(tx, i);
          } else if (op < 9) {
            l.rollback(tx);
          } else {
            l.settle(tx);
          }
        }
        if (!l.has(tx) || op >= 7) live.erase(live.begin() + static_cast<std::ptrdiff_t>(pos));
      }
      ASSERT_EQ(g.total_balance(), total);
      Amount open;
      for (TxId tx = 0; tx < next; ++tx)
        for (const auto& lk : l.locks(tx))
          if (lk.open) open += lk.amount;
      ASSERT_EQ(open, g.total_locked());
      for (const auto& c : g.channels()) {
        ASSERT_GE(c.available(Direction::forward), Amount{});
        ASSERT_GE(c.available(Direction::backward), Amount{});
      }
    }
  }
}
