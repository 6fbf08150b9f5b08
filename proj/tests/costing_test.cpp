#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "pcnsim/costing.hpp"
#include "pcnsim/generators.hpp"
#include "test_support.hpp"

using namespace pcnsim;

namespace {
FeeSchedule fees(std::int64_t open, std::int64_t close, std::int64_t cap) {
  return {Amount::from_units(open), Amount::from_units(close), Amount::from_units(cap)};
}
}  // namespace

TEST(Cost, CentralityFormula) {
  EXPECT_EQ(cost_centrality(1376, fees(10, 10, 717)), Amount::from_units(1'000'352));
  EXPECT_EQ(cost_centrality(2, fees(1, 0, 3)), Amount::from_units(8));
  EXPECT_EQ(cost_centrality(0, fees(10, 10, 717)), Amount{});
}

TEST(Cost, TreeFormulaAddsChurn) {
  EXPECT_EQ(cost_tree(0, 0, fees(10, 10, 717)), Amount{});
  EXPECT_GT(cost_tree(3307.7, 0, fees(10, 10, 717)), cost_centrality(1376, fees(10, 10, 717)));
  EXPECT_EQ(cost_tree(1, 2, fees(1, 1, 3)), Amount::from_units(8));
  EXPECT_EQ(cost_tree(1376, 0, fees(10, 10, 717)), cost_centrality(1376, fees(10, 10, 717)));
}

TEST(Cost, FractionalChannelCounts) {
  EXPECT_EQ(cost_centrality(1.5, fees(1, 0, 1)), Amount::from_units(3));
}

TEST(Cost, RejectsNegativeInput) {
  EXPECT_THROW(cost_centrality(-1, fees(1, 1, 1)), InvalidParameters);
  EXPECT_THROW(cost_tree(1, -1, fees(1, 1, 1)), InvalidParameters);
  EXPECT_THROW(cost_centrality(1, fees(-1, 1, 1)), InvalidParameters);
  EXPECT_THROW(parse_cost_strategy("bribe"), InvalidParameters);
}

TEST(Cost, MeasuresChannelsTouchingAdversaries) {
  Graph g(5);
  g.add_channel(0, 1);
  g.add_channel(0, 2);
  g.add_channel(1, 2);
  g.add_channel(3, 4);
  EXPECT_EQ(measure_attack_channels(AdversarySet(5, {0}, "t"), g), 2u);
  EXPECT_EQ(measure_attack_channels(AdversarySet(5, {0, 1}, "t"), g), 3u);
  EXPECT_EQ(measure_attack_channels(AdversarySet(5, {}, "t"), g), 0u);
}

TEST(Cost, DegreeSevenNode) {
  Graph g(9);
  for (NodeId v = 1; v < 8; ++v) g.add_channel(0, v);
  g.add_channel(8, 1);
  EXPECT_EQ(measure_attack_channels(AdversarySet(9, {0}, "t"), g), 7u);
}

TEST(Cost, MeasureMatchesIncidenceOracle) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = testing_support::draw(rng, 2, 60);
    const Graph g = trial % 2 ? testing_support::random_connected(rng, n, n)
                              : generate_scale_free(std::max<std::size_t>(n, 3), 2, rng());
    const auto adv = select_random(g, 0.2, rng());
    std::set<std::pair<NodeId, NodeId>> touched;
    for (NodeId v : adv.nodes())
      for (const auto& a : g.neighbors(v)) touched.insert({std::min(v, a.node), std::max(v, a.node)});
    EXPECT_EQ(measure_attack_channels(adv, g), touched.size());
  }
}

TEST(Cost, LinearAndMonotone) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto k = static_cast<double>(testing_support::draw(rng, 0, 5000));
    const auto x = static_cast<double>(testing_support::draw(rng, 0, 50));
    const auto f = fees(static_cast<std::int64_t>(testing_support::draw(rng, 0, 20)),
                        static_cast<std::int64_t>(testing_support::draw(rng, 0, 20)),
                        static_cast<std::int64_t>(testing_support::draw(rng, 0, 1000)));
    EXPECT_EQ(cost_centrality(2 * k, f).micros(), 2 * cost_centrality(k, f).micros());
    EXPECT_EQ(cost_tree(k, x, f), cost_centrality(k, f) + cost_tree(0, x, f));
    for (int field = 0; field < 3; ++field) {
      FeeSchedule more = f;
      (field == 0 ? more.f_open : field == 1 ? more.f_close : more.cap) += Amount::from_units(1);
      EXPECT_GE(cost_centrality(k, more), cost_centrality(k, f));
      EXPECT_GE(cost_tree(k, x, more), cost_tree(k, x, f));
    }
  }
}

TEST(Cost, CsvLayout) {
  std::ostringstream out;
  write_cost_csv(out, make_cost_report(CostStrategy::tree, 1, 2, fees(1, 1, 3)), {"note"});
  EXPECT_EQ(out.str(),
            "# note\n"
            "strategy,channel_count,expected_attempts,f_open,f_close,cap,total\n"
            "tree,1,2,1.000000,1.000000,3.000000,8.000000\n");
}
