#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pcnsim/amount.hpp"
#include "pcnsim/centrality.hpp"
#include "pcnsim/embedding.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"

namespace pcnsim {

using Duration = std::chrono::microseconds;

enum class AttackAction { drop, delay };
enum class Selection { random, tree, centrality, ideal };
enum class IdealMetric { value, count };
enum class Phase { commitment, settlement };

inline std::string to_string(AttackAction a) { return a == AttackAction::drop ? "drop" : "delay"; }

inline std::string to_string(Selection s) {
  switch (s) {
    case Selection::random: return "random";
    case Selection::tree: return "tree";
    case Selection::centrality: return "centrality";
    case Selection::ideal: return "ideal";
  }
  return "?";
}

inline Selection parse_selection(const std::string& s) {
  if (s == "random") return Selection::random;
  if (s == "tree") return Selection::tree;
  if (s == "centrality") return Selection::centrality;
  if (s == "ideal") return Selection::ideal;
  throw InvalidParameters("unknown attacker selection: " + s);
}

struct AttackConfig {
  AttackAction action = AttackAction::drop;
  Selection selection = Selection::random;
  double fraction = 0.0;
  Duration delay = std::chrono::milliseconds(10'000);
  double grief_probability = 1.0;
  IdealMetric ideal_metric = IdealMetric::value;
  std::uint64_t seed = 0;
};

inline void validate(const AttackConfig& c) {
  if (!(c.fraction >= 0.0 && c.fraction <= 1.0)) throw InvalidParameters("attacker fraction must lie in [0, 1]");
  if (c.delay.count() <= 0) throw InvalidParameters("attack delay must be positive");
  if (!(c.grief_probability >= 0.0 && c.grief_probability <= 1.0))
    throw InvalidParameters("grief probability must lie in [0, 1]");
}

// Per-node totals of forwarded commitment hops from a run.
struct RelayStats {
  std::uint64_t count = 0;
  Amount value;

  friend bool operator==(const RelayStats&, const RelayStats&) = default;
};
using RelayProfile = std::vector<RelayStats>;

class AdversarySet {
 public:
  AdversarySet() = default;
  AdversarySet(std::size_t node_count, std::vector<NodeId> nodes, std::string provenance)
      : member_(node_count, 0), nodes_(std::move(nodes)), provenance_(std::move(provenance)) {
    std::sort(nodes_.begin(), nodes_.end());
    for (NodeId v : nodes_) {
      if (v >= node_count) throw InvalidParameters("adversary outside graph");
      member_[v] = 1;
    }
  }

  bool contains(NodeId v) const { return v < member_.size() && member_[v] != 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  const std::string& provenance() const noexcept { return provenance_; }

 private:
  std::vector<char> member_;
  std::vector<NodeId> nodes_;
  std::string provenance_;
};

inline std::size_t attacker_count(double fraction, std::size_t n) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidParameters("attacker fraction must lie in [0, 1]");
  return std::min(n, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
}

namespace detail {

// Top-k indices by descending score, ties to the smaller id.
template <typename Score>
std::vector<NodeId> top_k(std::size_t n, std::size_t k, Score&& score) {
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  auto better = [&](NodeId x, NodeId y) {
    const auto sx = score(x), sy = score(y);
    return sx != sy ? sx > sy : x < y;
  };
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), better);
  ids.resize(k);
  return ids;
}

}  // namespace detail

inline AdversarySet select_random(const Graph& g, double fraction, std::uint64_t seed) {
  const std::size_t k = attacker_count(fraction, g.node_count());
  std::vector<NodeId> ids(g.node_count());
  std::iota(ids.begin(), ids.end(), NodeId{0});
  Rng rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(k);
  return AdversarySet(g.node_count(), std::move(ids), "random(fraction=" + std::to_string(fraction) + ")");
}

inline AdversarySet select_centrality(std::span<const double> scores, double fraction) {
  const std::size_t k = attacker_count(fraction, scores.size());
  return AdversarySet(scores.size(), detail::top_k(scores.size(), k, [&](NodeId v) { return scores[v]; }),
                      "centrality(fraction=" + std::to_string(fraction) + ")");
}

inline AdversarySet select_centrality(const Graph& g, double fraction) {
  const auto scores = betweenness_centrality(g);
  return select_centrality(scores, fraction);
}

// Round-robin over trees: each tree in turn takes its shallowest non-root
// node not yet chosen (ties to the smaller id) until x nodes are picked.
// Every tree root is excluded. Nodes detached from a tree rank last in it.
inline AdversarySet select_tree_depth(const TreeSet& trees, double fraction, std::size_t n) {
  if (trees.size() == 0) throw InvalidParameters("tree selection needs spanning trees");
  std::vector<char> is_root(n, 0);
  for (const auto& t : trees.trees) is_root[t.root] = 1;
  std::size_t eligible = 0;
  for (std::size_t v = 0; v < n; ++v) eligible += is_root[v] ? 0 : 1;
  const std::size_t x = std::min(attacker_count(fraction, n), eligible);

  std::vector<std::vector<NodeId>> ranking;
  for (const auto& t : trees.trees) {
    std::vector<NodeId> ids;
    for (NodeId v = 0; v < n; ++v)
      if (!is_root[v]) ids.push_back(v);
    auto key = [&](NodeId v) { return t.contains(v) ? t.depth(v) : static_cast<std::size_t>(-1); };
    std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) { return key(a) < key(b); });
    ranking.push_back(std::move(ids));
  }
  std::vector<char> chosen(n, 0);
  std::vector<std::size_t> cursor(trees.size(), 0);
  std::vector<NodeId> picked;
  while (picked.size() < x) {
    for (std::size_t i = 0; i < trees.size() && picked.size() < x; ++i) {
      auto& c = cursor[i];
      while (c < ranking[i].size() && chosen[ranking[i][c]]) ++c;
      if (c == ranking[i].size()) continue;
      chosen[ranking[i][c]] = 1;
      picked.push_back(ranking[i][c]);
    }
  }
  return AdversarySet(n, std::move(picked), "tree(fraction=" + std::to_string(fraction) + ")");
}

inline AdversarySet select_ideal(const RelayProfile& profile, double fraction, std::size_t n,
                                 IdealMetric metric = IdealMetric::value) {
  if (profile.size() != n) throw InvalidParameters("missing relay profile for ideal attacker selection");
  const std::size_t k = attacker_count(fraction, n);
  auto ids = metric == IdealMetric::value
                 ? detail::top_k(n, k, [&](NodeId v) { return profile[v].value.micros(); })
                 : detail::top_k(n, k, [&](NodeId v) { return static_cast<std::int64_t>(profile[v].count); });
  return AdversarySet(n, std::move(ids), "ideal(fraction=" + std::to_string(fraction) + ")");
}

enum class Verdict { forward, drop, delay };

struct Interception {
  Verdict verdict = Verdict::forward;
  Duration delay{0};
};

// Decision of an adversarial hop target. Dropping only happens during
// commitment. The grief coin is only drawn for adversarial delay hops with
// probability below one, so honest traffic never consumes randomness.
inline Interception intercept(NodeId to, Phase phase, const AdversarySet& adversaries, const AttackConfig& config,
                              Rng& rng) {
  if (!adversaries.contains(to) || phase != Phase::commitment) return {};
  if (config.action == AttackAction::drop) return {Verdict::drop, Duration{0}};
  if (config.grief_probability >= 1.0 || uniform01(rng) < config.grief_probability)
    return {Verdict::delay, config.delay};
  return {};
}

}  // namespace pcnsim
