#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"

namespace pcnsim {

namespace detail {

inline constexpr int kMaxGeneratorAttempts = 32;

// Re-runs build with fresh derived seeds until the result is connected.
template <typename Build>
Graph generate_connected(std::uint64_t seed, const char* name, Build&& build) {
  for (int attempt = 0; attempt < kMaxGeneratorAttempts; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, 0x1000u + attempt);
    Graph g = build(s);
    if (g.connected()) return g;
  }
  throw InvalidParameters(std::string(name) + ": could not produce a connected graph");
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace detail

// Barabási–Albert preferential attachment. Starts from a star on
// attachments+1 nodes; every later node links to `attachments` distinct
// existing nodes drawn proportionally to degree.
inline Graph generate_scale_free(std::size_t nodes, std::size_t attachments, std::uint64_t seed) {
  if (attachments < 1 || nodes <= attachments)
    throw InvalidParameters("scale-free generator needs attachments >= 1 and nodes > attachments");
  return detail::generate_connected(seed, "scale-free", [&](std::uint64_t s) {
    Rng rng(s);
    Graph g(nodes);
    std::vector<NodeId> repeated;
    repeated.reserve(2 * nodes * attachments);
    for (NodeId leaf = 1; leaf <= attachments; ++leaf) {
      g.add_channel(0, leaf);
      repeated.push_back(0);
      repeated.push_back(leaf);
    }
    std::vector<NodeId> targets;
    for (auto source = static_cast<NodeId>(attachments + 1); source < nodes; ++source) {
      targets.clear();
      while (targets.size() < attachments) {
        const NodeId pick = repeated[detail::uniform_index(rng, repeated.size())];
        if (std::find(targets.begin(), targets.end(), pick) == targets.end()) targets.push_back(pick);
      }
      for (NodeId t : targets) {
        g.add_channel(source, t);
        repeated.push_back(t);
        repeated.push_back(source);
      }
    }
    return g;
  });
}

// Newman–Watts–Strogatz: ring lattice with k nearest neighbours, plus for
// every lattice edge a shortcut from its first endpoint with probability p.
// Lattice edges are never removed.
inline Graph generate_small_world(std::size_t nodes, std::size_t ring_neighbors, double shortcut_probability,
                                  std::uint64_t seed) {
  if (ring_neighbors < 2 || ring_neighbors % 2 != 0 || nodes <= ring_neighbors)
    throw InvalidParameters("small-world generator needs even k >= 2 and n > k");
  if (!(shortcut_probability >= 0.0 && shortcut_probability <= 1.0))
    throw InvalidParameters("small-world shortcut probability must lie in [0, 1]");
  return detail::generate_connected(seed, "small-world", [&](std::uint64_t s) {
    Rng rng(s);
    Graph g(nodes);
    const std::size_t half = ring_neighbors / 2;
    for (std::size_t j = 1; j <= half; ++j)
      for (std::size_t u = 0; u < nodes; ++u)
        g.add_channel(static_cast<NodeId>(u), static_cast<NodeId>((u + j) % nodes));
    for (std::size_t j = 1; j <= half; ++j) {
      for (std::size_t u = 0; u < nodes; ++u) {
        if (!(uniform01(rng) < shortcut_probability)) continue;
        if (g.degree(static_cast<NodeId>(u)) >= nodes - 1) continue;
        NodeId w;
        do {
          w = static_cast<NodeId>(detail::uniform_index(rng, nodes));
        } while (w == u || g.find_channel(static_cast<NodeId>(u), w));
        g.add_channel(static_cast<NodeId>(u), w);
      }
    }
    return g;
  });
}

}  // namespace pcnsim
