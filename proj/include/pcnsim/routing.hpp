#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pcnsim/amount.hpp"
#include "pcnsim/embedding.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"

namespace pcnsim {

struct Share {
  std::size_t tree = 0;
  Amount amount;
};

// n shares summing exactly to value, cut at n-1 sorted uniform points over
// [0, value] in micro-units. Zero shares are possible.
inline std::vector<Share> split_payment(Amount value, std::size_t n_trees, Rng& rng) {
  if (!value.positive()) throw InvalidParameters("payment value must be positive");
  if (n_trees < 1) throw InvalidParameters("need at least one share");
  std::vector<std::int64_t> cuts;
  cuts.reserve(n_trees + 1);
  cuts.push_back(0);
  std::uniform_int_distribution<std::int64_t> point(0, value.micros());
  for (std::size_t i = 1; i < n_trees; ++i) cuts.push_back(point(rng));
  cuts.push_back(value.micros());
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  std::vector<Share> shares(n_trees);
  for (std::size_t i = 0; i < n_trees; ++i)
    shares[i] = Share{i, Amount::from_micros(cuts[i + 1] - cuts[i])};
  return shares;
}

struct AnyChannel {
  constexpr bool operator()(ChannelId) const noexcept { return true; }
};

// Greedy embedded routing step: the funded neighbour strictly closer to the
// recipient in tree distance, minimal distance first, ties to the smaller id.
// Channels rejected by `usable` are skipped.
template <typename Usable = AnyChannel>
std::optional<Adjacent> next_hop_sm(const Graph& g, const SpanningTree& tree, NodeId current,
                                    std::span<const std::uint64_t> recipient_coord, Amount amount,
                                    Usable&& usable = {}) {
  if (!tree.contains(current)) return std::nullopt;
  std::size_t best = tree_distance(tree.coords[current], recipient_coord);
  std::optional<Adjacent> pick;
  for (const auto& adj : g.neighbors(current)) {
    if (!tree.contains(adj.node)) continue;
    const std::size_t d = tree_distance(tree.coords[adj.node], recipient_coord);
    if (d >= best) continue;
    if (g.available(current, adj.channel) < amount || !usable(adj.channel)) continue;
    best = d;
    pick = adj;
  }
  return pick;
}

struct FlowPath {
  std::vector<NodeId> nodes;
  std::vector<ChannelId> channels;
  Amount amount;
};

struct FlowPlan {
  Amount total;
  std::vector<FlowPath> paths;
};

// Reusable scratch space for max-flow searches on one graph.
class MaxFlowWorkspace {
 public:
  void prepare(std::size_t n) {
    if (stamp_.size() != n) {
      stamp_.assign(n, 0);
      via_.assign(n, kNoChannel);
      generation_ = 0;
    }
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
  }
  bool seen(NodeId v) const { return stamp_[v] == generation_; }
  void mark(NodeId v, ChannelId via) {
    stamp_[v] = generation_;
    via_[v] = via;
  }
  ChannelId via(NodeId v) const { return via_[v]; }

  std::vector<NodeId> queue;

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<ChannelId> via_;
  std::uint32_t generation_ = 0;
};

// Edmonds–Karp over available balances (each channel is a pair of opposed
// arcs), stopped once `limit` is reached, then decomposed into simple paths.
// Channels rejected by `usable` carry no flow.
template <typename Usable = AnyChannel>
FlowPlan plan_max_flow(const Graph& g, NodeId source, NodeId sink, Amount limit, MaxFlowWorkspace& ws,
                       Usable&& usable = {}) {
  FlowPlan plan;
  if (source == sink || !limit.positive()) return plan;
  std::unordered_map<ChannelId, std::int64_t> net;  // micro-units a -> b

  auto flow_along = [&](ChannelId id, NodeId from) -> std::int64_t {
    auto it = net.find(id);
    const std::int64_t f = it == net.end() ? 0 : it->second;
    return g.channel(id).a == from ? f : -f;
  };
  auto residual = [&](ChannelId id, NodeId from) -> std::int64_t {
    return g.available(from, id).micros() - flow_along(id, from);
  };

  std::int64_t total = 0;
  while (total < limit.micros()) {
    ws.prepare(g.node_count());
    ws.queue.clear();
    ws.queue.push_back(source);
    ws.mark(source, kNoChannel);
    bool found = false;
    for (std::size_t head = 0; head < ws.queue.size() && !found; ++head) {
      const NodeId u = ws.queue[head];
      for (const auto& adj : g.neighbors(u)) {
        if (ws.seen(adj.node) || residual(adj.channel, u) <= 0 || !usable(adj.channel)) continue;
        ws.mark(adj.node, adj.channel);
        if (adj.node == sink) {
          found = true;
          break;
        }
        ws.queue.push_back(adj.node);
      }
    }
    if (!found) break;
    std::int64_t bottleneck = limit.micros() - total;
    for (NodeId v = sink; v != source;) {
      const ChannelId id = ws.via(v);
      const NodeId u = g.channel(id).other(v);
      bottleneck = std::min(bottleneck, residual(id, u));
      v = u;
    }
    for (NodeId v = sink; v != source;) {
      const ChannelId id = ws.via(v);
      const NodeId u = g.channel(id).other(v);
      net[id] += g.channel(id).a == u ? bottleneck : -bottleneck;
      v = u;
    }
    total += bottleneck;
  }
  plan.total = Amount::from_micros(total);

  // Decompose: walk positive-flow arcs from the source, cancelling any cycle.
  auto next_arc = [&](NodeId u) -> std::optional<Adjacent> {
    for (const auto& adj : g.neighbors(u))
      if (flow_along(adj.channel, u) > 0) return adj;
    return std::nullopt;
  };
  std::int64_t remaining = total;
  while (remaining > 0) {
    std::vector<NodeId> nodes{source};
    std::vector<ChannelId> chans;
    std::unordered_map<NodeId, std::size_t> position{{source, 0}};
    while (nodes.back() != sink) {
      auto arc = next_arc(nodes.back());
      PCNSIM_ENSURE(arc.has_value(), "flow decomposition lost conservation");
      if (auto it = position.find(arc->node); it != position.end()) {
        // Cycle nodes[it->second] .. back -> arc->node: cancel it.
        std::vector<ChannelId> cyc(chans.begin() + static_cast<std::ptrdiff_t>(it->second), chans.end());
        cyc.push_back(arc->channel);
        std::int64_t m = INT64_MAX;
        for (std::size_t i = 0; i < cyc.size(); ++i) m = std::min(m, flow_along(cyc[i], nodes[it->second + i]));
        for (std::size_t i = 0; i < cyc.size(); ++i) {
          const NodeId from = nodes[it->second + i];
          net[cyc[i]] -= g.channel(cyc[i]).a == from ? m : -m;
        }
        for (std::size_t i = it->second + 1; i < nodes.size(); ++i) position.erase(nodes[i]);
        nodes.resize(it->second + 1);
        chans.resize(it->second);
        continue;
      }
      position.emplace(arc->node, nodes.size());
      nodes.push_back(arc->node);
      chans.push_back(arc->channel);
    }
    std::int64_t m = remaining;
    for (std::size_t i = 0; i < chans.size(); ++i) m = std::min(m, flow_along(chans[i], nodes[i]));
    for (std::size_t i = 0; i < chans.size(); ++i) net[chans[i]] -= g.channel(chans[i]).a == nodes[i] ? m : -m;
    remaining -= m;
    plan.paths.push_back(FlowPath{std::move(nodes), std::move(chans), Amount::from_micros(m)});
  }
  return plan;
}

inline Amount max_flow_value(const Graph& g, NodeId source, NodeId sink) {
  MaxFlowWorkspace ws;
  return plan_max_flow(g, source, sink, Amount::from_micros(INT64_MAX / 4), ws).total;
}

}  // namespace pcnsim
