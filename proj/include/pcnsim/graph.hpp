#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "pcnsim/amount.hpp"
#include "pcnsim/error.hpp"

namespace pcnsim {

using NodeId = std::uint32_t;
using ChannelId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);
inline constexpr ChannelId kNoChannel = static_cast<ChannelId>(-1);

// Forward is a -> b for a channel stored as (a, b) with a < b.
enum class Direction : std::uint8_t { forward = 0, backward = 1 };

constexpr Direction reverse(Direction d) noexcept {
  return d == Direction::forward ? Direction::backward : Direction::forward;
}

constexpr std::size_t index(Direction d) noexcept { return static_cast<std::size_t>(d); }

// A bidirectional payment channel. balance[d] is what the source side of
// direction d can still send; locked[d] is the part of it reserved by
// in-flight payments.
struct Channel {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  std::array<Amount, 2> balance{};
  std::array<Amount, 2> locked{};

  Amount available(Direction d) const noexcept { return balance[index(d)] - locked[index(d)]; }

  Amount capacity() const noexcept { return balance[0] + balance[1]; }

  NodeId source(Direction d) const noexcept { return d == Direction::forward ? a : b; }
  NodeId target(Direction d) const noexcept { return d == Direction::forward ? b : a; }

  Direction direction_from(NodeId from) const noexcept {
    return from == a ? Direction::forward : Direction::backward;
  }

  NodeId other(NodeId n) const noexcept { return n == a ? b : a; }

  void lock(Direction d, Amount amount) {
    PCNSIM_ENSURE(amount.micros() >= 0, "negative lock");
    PCNSIM_ENSURE(available(d) >= amount, "lock exceeds available balance");
    locked[index(d)] += amount;
  }

  void release(Direction d, Amount amount) {
    PCNSIM_ENSURE(amount.micros() >= 0 && locked[index(d)] >= amount, "release exceeds locked collateral");
    locked[index(d)] -= amount;
  }

  // Converts a lock into a transfer to the other side.
  void settle(Direction d, Amount amount) {
    PCNSIM_ENSURE(amount.micros() >= 0 && locked[index(d)] >= amount, "settle exceeds locked collateral");
    locked[index(d)] -= amount;
    balance[index(d)] -= amount;
    balance[index(reverse(d))] += amount;
    PCNSIM_ENSURE(available(d).micros() >= 0, "negative available balance after settle");
  }

  void set_balance(Direction d, Amount amount) {
    PCNSIM_ENSURE(amount.micros() >= 0, "negative balance");
    PCNSIM_ENSURE(amount >= locked[index(d)], "balance below locked collateral");
    balance[index(d)] = amount;
  }
};

struct Adjacent {
  NodeId node;
  ChannelId channel;
};

// The payment channel network: dense node ids, at most one channel per
// unordered pair, adjacency lists kept sorted by neighbour id.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t node_count) : adjacency_(node_count) {}

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t channel_count() const noexcept { return channels_.size(); }

  ChannelId add_channel(NodeId u, NodeId v, Amount balance_uv = {}, Amount balance_vu = {}) {
    if (u == v) throw InvalidParameters("self-loop channel on node " + std::to_string(u));
    if (u >= node_count() || v >= node_count())
      throw InvalidParameters("channel endpoint out of range");
    if (find_channel(u, v)) {
      throw InvalidParameters("duplicate channel " + std::to_string(u) + "-" + std::to_string(v));
    }
    if (balance_uv.micros() < 0 || balance_vu.micros() < 0) throw InvalidParameters("negative balance");
    Channel c;
    c.a = std::min(u, v);
    c.b = std::max(u, v);
    c.balance[index(c.direction_from(u))] = balance_uv;
    c.balance[index(c.direction_from(v))] = balance_vu;
    const auto id = static_cast<ChannelId>(channels_.size());
    channels_.push_back(c);
    insert_sorted(adjacency_[u], Adjacent{v, id});
    insert_sorted(adjacency_[v], Adjacent{u, id});
    return id;
  }

  std::optional<ChannelId> find_channel(NodeId u, NodeId v) const {
    if (u >= node_count() || v >= node_count()) return std::nullopt;
    const auto& list = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
    const NodeId want = adjacency_[u].size() <= adjacency_[v].size() ? v : u;
    auto it = std::lower_bound(list.begin(), list.end(), want,
                               [](const Adjacent& adj, NodeId n) { return adj.node < n; });
    if (it != list.end() && it->node == want) return it->channel;
    return std::nullopt;
  }

  const Channel& channel(ChannelId id) const { return channels_[id]; }
  Channel& channel(ChannelId id) { return channels_[id]; }
  std::span<const Channel> channels() const noexcept { return channels_; }

  std::span<const Adjacent> neighbors(NodeId n) const { return adjacency_[n]; }
  std::size_t degree(NodeId n) const { return adjacency_[n].size(); }

  Amount available(NodeId from, ChannelId id) const {
    const Channel& c = channels_[id];
    return c.available(c.direction_from(from));
  }

  bool connected() const {
    if (node_count() == 0) return true;
    std::vector<char> seen(node_count(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (const auto& adj : adjacency_[u]) {
        if (!seen[adj.node]) {
          seen[adj.node] = 1;
          ++reached;
          stack.push_back(adj.node);
        }
      }
    }
    return reached == node_count();
  }

  // Hop distances from source; unreachable nodes get kUnreachable.
  static constexpr std::uint32_t kUnreachable = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> hop_distances(NodeId source) const {
    std::vector<std::uint32_t> dist(node_count(), kUnreachable);
    std::queue<NodeId> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      for (const auto& adj : adjacency_[u]) {
        if (dist[adj.node] == kUnreachable) {
          dist[adj.node] = dist[u] + 1;
          frontier.push(adj.node);
        }
      }
    }
    return dist;
  }

  Amount total_balance() const {
    Amount sum;
    for (const auto& c : channels_) sum += c.capacity();
    return sum;
  }

  Amount total_locked() const {
    Amount sum;
    for (const auto& c : channels_) sum += c.locked[0] + c.locked[1];
    return sum;
  }

  // Topology and balances equal (locks included).
  friend bool operator==(const Graph& lhs, const Graph& rhs) {
    if (lhs.node_count() != rhs.node_count() || lhs.channel_count() != rhs.channel_count()) return false;
    for (std::size_t i = 0; i < lhs.channels_.size(); ++i) {
      const auto& x = lhs.channels_[i];
      const auto& y = rhs.channels_[i];
      if (x.a != y.a || x.b != y.b || x.balance != y.balance || x.locked != y.locked) return false;
    }
    return true;
  }

 private:
  static void insert_sorted(std::vector<Adjacent>& list, Adjacent adj) {
    auto it = std::lower_bound(list.begin(), list.end(), adj.node,
                               [](const Adjacent& a, NodeId n) { return a.node < n; });
    list.insert(it, adj);
  }

  std::vector<Channel> channels_;
  std::vector<std::vector<Adjacent>> adjacency_;
};

}  // namespace pcnsim
