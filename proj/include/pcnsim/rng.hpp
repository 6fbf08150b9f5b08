#pragma once

#include <cstdint>
#include <random>

namespace pcnsim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream identifiers. Every random decision in a run draws from
// exactly one of these, so enabling one stage never perturbs another.
enum class Stream : std::uint64_t {
  topology = 1,
  workload = 2,
  balances = 3,
  multiplier = 4,
  trees = 5,
  engine = 6,
  attack = 7,
  grief = 8,
};

// Counter-based sub-seed: splitmix64(master ^ splitmix64(stream)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(stream));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pcnsim
