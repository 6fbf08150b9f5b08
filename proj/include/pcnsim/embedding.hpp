#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"

namespace pcnsim {

// Prefix-embedding address of a node in one spanning tree. The root holds
// the empty vector; a child extends its parent's coordinate by one element.
using Coordinate = std::vector<std::uint64_t>;

inline std::size_t common_prefix_length(std::span<const std::uint64_t> u, std::span<const std::uint64_t> v) {
  const std::size_t n = std::min(u.size(), v.size());
  std::size_t i = 0;
  while (i < n && u[i] == v[i]) ++i;
  return i;
}

// Tree hop distance |u| + |v| - 2 cpl(u, v).
inline std::size_t tree_distance(std::span<const std::uint64_t> u, std::span<const std::uint64_t> v) {
  return u.size() + v.size() - 2 * common_prefix_length(u, v);
}

// Channels usable as tree edges carry available balance both ways.
inline bool tree_usable(const Channel& c) {
  return c.available(Direction::forward).positive() && c.available(Direction::backward).positive();
}

struct SpanningTree {
  NodeId root = kNoNode;
  std::vector<NodeId> parent;             // kNoNode for the root and detached nodes
  std::vector<ChannelId> parent_channel;  // kNoChannel likewise
  std::vector<Coordinate> coords;
  std::vector<std::vector<NodeId>> children;
  std::vector<char> attached;

  bool contains(NodeId v) const { return attached[v] != 0; }
  std::size_t depth(NodeId v) const { return coords[v].size(); }
  std::size_t node_count() const { return parent.size(); }

  bool has_edge(ChannelId id, const Graph& g) const {
    const Channel& c = g.channel(id);
    return parent_channel[c.a] == id || parent_channel[c.b] == id;
  }

  std::size_t distance(NodeId u, NodeId v) const { return tree_distance(coords[u], coords[v]); }
};

enum class RootSelection { degree, random };

struct TreeSet {
  std::vector<SpanningTree> trees;
  Rng rng;

  std::size_t size() const noexcept { return trees.size(); }
  const SpanningTree& operator[](std::size_t i) const { return trees[i]; }
};

namespace detail {

inline void assign_subtree_coords(SpanningTree& t, NodeId top, Rng& rng) {
  std::vector<NodeId> stack{top};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (v != t.root) {
      t.coords[v] = t.coords[t.parent[v]];
      t.coords[v].push_back(rng());
    }
    for (auto it = t.children[v].rbegin(); it != t.children[v].rend(); ++it) stack.push_back(*it);
  }
}

inline SpanningTree bfs_tree(const Graph& g, NodeId root, Rng& rng) {
  const std::size_t n = g.node_count();
  SpanningTree t;
  t.root = root;
  t.parent.assign(n, kNoNode);
  t.parent_channel.assign(n, kNoChannel);
  t.coords.assign(n, {});
  t.children.assign(n, {});
  t.attached.assign(n, 0);

  std::vector<std::uint32_t> dist(n, Graph::kUnreachable);
  std::vector<NodeId> order{root};
  dist[root] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const NodeId u = order[head];
    for (const auto& adj : g.neighbors(u)) {
      if (dist[adj.node] == Graph::kUnreachable && tree_usable(g.channel(adj.channel))) {
        dist[adj.node] = dist[u] + 1;
        order.push_back(adj.node);
      }
    }
  }
  t.attached[root] = 1;
  std::vector<Adjacent> options;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const NodeId v = order[i];
    options.clear();
    for (const auto& adj : g.neighbors(v))
      if (dist[adj.node] + 1 == dist[v] && tree_usable(g.channel(adj.channel))) options.push_back(adj);
    const Adjacent pick = options[options.size() == 1 ? 0 : std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    t.parent[v] = pick.node;
    t.parent_channel[v] = pick.channel;
    t.children[pick.node].push_back(v);
    t.attached[v] = 1;
  }
  for (auto& c : t.children) std::sort(c.begin(), c.end());
  assign_subtree_coords(t, root, rng);
  return t;
}

}  // namespace detail

// Roots are the highest-degree nodes (ties: smaller id), or a seeded random
// choice. Each tree is a breadth-first tree over channels funded in both
// directions, with a random choice among equally shallow parents.
inline TreeSet build_trees(const Graph& g, std::size_t count, std::uint64_t seed,
                           RootSelection roots = RootSelection::degree) {
  if (count < 1) throw InvalidParameters("need at least one spanning tree");
  if (count > g.node_count()) throw InvalidParameters("more trees than nodes");
  TreeSet set;
  set.rng.seed(seed);
  std::vector<NodeId> ranked(g.node_count());
  std::iota(ranked.begin(), ranked.end(), NodeId{0});
  if (roots == RootSelection::degree) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](NodeId x, NodeId y) { return g.degree(x) > g.degree(y); });
  } else {
    std::shuffle(ranked.begin(), ranked.end(), set.rng);
  }
  for (std::size_t i = 0; i < count; ++i) set.trees.push_back(detail::bfs_tree(g, ranked[i], set.rng));
  return set;
}

// Repairs every tree that uses `depleted` as a parent edge: the orphaned
// child reattaches its subtree to the shallowest eligible neighbour outside
// that subtree (random among equals), and the subtree is re-addressed. With no
// eligible neighbour the subtree is detached from that tree. Returns the
// number of trees touched.
inline std::size_t rebalance(TreeSet& set, const Graph& g, ChannelId depleted) {
  const Channel& dc = g.channel(depleted);
  if (tree_usable(dc)) return 0;
  std::size_t touched = 0;
  for (auto& t : set.trees) {
    NodeId child = kNoNode;
    if (t.parent_channel[dc.a] == depleted) child = dc.a;
    else if (t.parent_channel[dc.b] == depleted) child = dc.b;
    if (child == kNoNode) continue;
    ++touched;

    auto& siblings = t.children[t.parent[child]];
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    t.parent[child] = kNoNode;
    t.parent_channel[child] = kNoChannel;

    std::vector<NodeId> subtree{child};
    for (std::size_t i = 0; i < subtree.size(); ++i)
      for (NodeId c : t.children[subtree[i]]) subtree.push_back(c);
    std::vector<NodeId> sorted_subtree = subtree;
    std::sort(sorted_subtree.begin(), sorted_subtree.end());
    auto inside = [&](NodeId v) { return std::binary_search(sorted_subtree.begin(), sorted_subtree.end(), v); };

    std::vector<Adjacent> best;
    std::size_t best_depth = static_cast<std::size_t>(-1);
    for (const auto& adj : g.neighbors(child)) {
      if (!t.contains(adj.node) || inside(adj.node) || !tree_usable(g.channel(adj.channel))) continue;
      const std::size_t d = t.depth(adj.node);
      if (d < best_depth) {
        best_depth = d;
        best.clear();
      }
      if (d == best_depth) best.push_back(adj);
    }

    if (best.empty()) {
      for (NodeId v : subtree) {
        t.attached[v] = 0;
        t.parent[v] = kNoNode;
        t.parent_channel[v] = kNoChannel;
        t.coords[v].clear();
        t.children[v].clear();
      }
      continue;
    }
    const Adjacent pick =
        best[best.size() == 1 ? 0 : std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(set.rng)];
    t.parent[child] = pick.node;
    t.parent_channel[child] = pick.channel;
    auto& kids = t.children[pick.node];
    kids.insert(std::lower_bound(kids.begin(), kids.end(), child), child);
    detail::assign_subtree_coords(t, child, set.rng);
  }
  return touched;
}

// Empty string when the tree is internally consistent; otherwise a
// description of the first violation. With require_funded, every tree edge
// must also be usable right now.
inline std::string tree_invariant_error(const SpanningTree& t, const Graph& g, bool require_funded) {
  const std::size_t n = g.node_count();
  if (t.node_count() != n) return "tree size differs from graph";
  if (!t.contains(t.root) || !t.coords[t.root].empty() || t.parent[t.root] != kNoNode) return "bad root";
  for (NodeId v = 0; v < n; ++v) {
    if (!t.contains(v)) {
      if (!t.coords[v].empty() || t.parent[v] != kNoNode || !t.children[v].empty())
        return "detached node " + std::to_string(v) + " keeps tree state";
      continue;
    }
    if (v == t.root) continue;
    const NodeId p = t.parent[v];
    if (p == kNoNode || !t.contains(p)) return "node " + std::to_string(v) + " has no attached parent";
    auto ch = g.find_channel(v, p);
    if (!ch || *ch != t.parent_channel[v]) return "parent edge of " + std::to_string(v) + " is not a channel";
    if (require_funded && !tree_usable(g.channel(*ch))) return "unfunded tree edge at " + std::to_string(v);
    const auto& cv = t.coords[v];
    const auto& cp = t.coords[p];
    if (cv.size() != cp.size() + 1 || !std::equal(cp.begin(), cp.end(), cv.begin()))
      return "prefix property broken at " + std::to_string(v);
    const auto& kids = t.children[p];
    if (std::find(kids.begin(), kids.end(), v) == kids.end()) return "child list misses " + std::to_string(v);
  }
  // Every attached node reaches the root (no cycles).
  for (NodeId v = 0; v < n; ++v) {
    if (!t.contains(v)) continue;
    NodeId cur = v;
    std::size_t steps = 0;
    while (cur != t.root) {
      cur = t.parent[cur];
      if (++steps > n) return "cycle through " + std::to_string(v);
    }
    if (steps != t.depth(v)) return "depth mismatch at " + std::to_string(v);
  }
  return {};
}

}  // namespace pcnsim
