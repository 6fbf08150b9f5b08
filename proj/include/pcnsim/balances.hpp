#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "pcnsim/amount.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"
#include "pcnsim/workload.hpp"

namespace pcnsim {

struct PathHop {
  NodeId from;
  NodeId to;
  Amount amount;

  friend bool operator==(const PathHop&, const PathHop&) = default;
};

struct RecordedPath {
  TxId txid;
  std::vector<PathHop> hops;
};

// Directional balances indexed by channel id, in the graph's (a, b) orientation.
struct BalanceAssignment {
  std::vector<std::array<Amount, 2>> balances;
  std::vector<RecordedPath> paths;
};

// Caches hop distances towards recent recipients; workloads concentrate on
// few recipients so this avoids one BFS per transaction.
class ShortestPathRouter {
 public:
  explicit ShortestPathRouter(const Graph& g, std::size_t cache_limit = 1024) : g_(g), limit_(cache_limit) {}

  // Unweighted shortest path from s to r. Among equal-length paths picks the
  // lexicographically smallest node sequence.
  std::vector<NodeId> path(NodeId s, NodeId r) {
    const auto& dist = distances_to(r);
    if (dist[s] == Graph::kUnreachable)
      throw InvalidParameters("unreachable pair " + std::to_string(s) + " -> " + std::to_string(r));
    std::vector<NodeId> nodes{s};
    NodeId cur = s;
    while (cur != r) {
      for (const auto& adj : g_.neighbors(cur)) {
        if (dist[adj.node] + 1 == dist[cur]) {
          cur = adj.node;
          break;
        }
      }
      nodes.push_back(cur);
    }
    return nodes;
  }

 private:
  const std::vector<std::uint32_t>& distances_to(NodeId r) {
    if (auto it = cache_.find(r); it != cache_.end()) return it->second;
    if (cache_.size() >= limit_) cache_.clear();
    return cache_.emplace(r, g_.hop_distances(r)).first->second;
  }

  const Graph& g_;
  std::size_t limit_;
  std::unordered_map<NodeId, std::vector<std::uint32_t>> cache_;
};

// CIB: start from zero balances and, for each transaction selected with
// probability tc, add its value to the forward direction of every hop on its
// shortest path.
inline BalanceAssignment compute_initial_balances(const TransactionSet& txs, const Graph& g, double tc,
                                                  std::uint64_t seed) {
  if (!(tc > 0.0 && tc <= 1.0)) throw InvalidParameters("tc must lie in (0, 1]");
  if (!g.connected()) throw InvalidParameters("initial balances need a connected graph");
  BalanceAssignment out;
  out.balances.assign(g.channel_count(), {});
  Rng rng(seed);
  ShortestPathRouter router(g);
  for (const auto& tx : txs.transactions) {
    if (tx.sender >= g.node_count() || tx.recipient >= g.node_count())
      throw InvalidParameters("transaction endpoint outside graph");
    if (!(uniform01(rng) < tc)) continue;
    const auto nodes = router.path(tx.sender, tx.recipient);
    RecordedPath rec{tx.id, {}};
    rec.hops.reserve(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const ChannelId id = *g.find_channel(nodes[i], nodes[i + 1]);
      const Direction d = g.channel(id).direction_from(nodes[i]);
      out.balances[id][index(d)] += tx.value;
      rec.hops.push_back(PathHop{nodes[i], nodes[i + 1], tx.value});
    }
    out.paths.push_back(std::move(rec));
  }
  return out;
}

// With probability p per channel, scales both directions by factor
// (truncating to the micro-unit).
inline BalanceAssignment apply_multiplier(BalanceAssignment b, double factor, double probability,
                                          std::uint64_t seed) {
  if (!(factor > 0.0 && factor <= 1.0)) throw InvalidParameters("multiplier must lie in (0, 1]");
  if (!(probability >= 0.0 && probability <= 1.0)) throw InvalidParameters("multiplier probability must lie in [0, 1]");
  Rng rng(seed);
  for (auto& dir : b.balances) {
    if (!(uniform01(rng) < probability)) continue;
    dir[0] = dir[0].scaled(factor);
    dir[1] = dir[1].scaled(factor);
  }
  return b;
}

// Raises every directional balance below `minimum` to `minimum`.
inline BalanceAssignment apply_floor(BalanceAssignment b, Amount minimum) {
  if (minimum.micros() < 0) throw InvalidParameters("balance floor must be >= 0");
  for (auto& dir : b.balances)
    for (auto& x : dir) x = max(x, minimum);
  return b;
}

inline void assign_balances(Graph& g, const BalanceAssignment& b) {
  if (b.balances.size() != g.channel_count()) throw InvalidParameters("balance assignment does not match graph");
  for (ChannelId id = 0; id < g.channel_count(); ++id) {
    Channel& c = g.channel(id);
    c.locked = {};
    c.set_balance(Direction::forward, b.balances[id][0]);
    c.set_balance(Direction::backward, b.balances[id][1]);
  }
}

inline void write_paths_csv(std::ostream& out, const std::vector<RecordedPath>& paths,
                            const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "txid,hop_index,from,to,amount\n";
  for (const auto& p : paths)
    for (std::size_t i = 0; i < p.hops.size(); ++i)
      out << p.txid << ',' << i << ',' << p.hops[i].from << ',' << p.hops[i].to << ','
          << p.hops[i].amount.to_string() << '\n';
}

}  // namespace pcnsim
