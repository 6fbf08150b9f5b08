#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pcnsim/amount.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/rng.hpp"

namespace pcnsim {

enum class Family { constant, pareto, exponential, normal, poisson };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::constant: return "constant";
    case Family::pareto: return "pareto";
    case Family::exponential: return "exponential";
    case Family::normal: return "normal";
    case Family::poisson: return "poisson";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "constant") return Family::constant;
  if (s == "pareto") return Family::pareto;
  if (s == "exponential" || s == "exp") return Family::exponential;
  if (s == "normal") return Family::normal;
  if (s == "poisson") return Family::poisson;
  throw InvalidParameters("unknown distribution family: " + s);
}

// `anchor` is the family's v_fix parameter: the constant value, the Pareto
// minimum (scale), or the mean for exponential, normal and Poisson.
struct DistributionSpec {
  Family family = Family::constant;
  double anchor = 1.0;
  double shape = 1.16;   // Pareto tail index
  double stddev = 1.0;   // normal only

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

inline std::string describe(const DistributionSpec& d) {
  std::ostringstream os;
  os << to_string(d.family) << "(anchor=" << d.anchor;
  if (d.family == Family::pareto) os << ",shape=" << d.shape;
  if (d.family == Family::normal) os << ",stddev=" << d.stddev;
  os << ')';
  return os.str();
}

inline void validate(const DistributionSpec& d, bool index_sampler = false) {
  if (!std::isfinite(d.anchor) || (index_sampler ? d.anchor < 0.0 : d.anchor <= 0.0))
    throw InvalidParameters("distribution anchor (v_fix) must be positive");
  if (d.family == Family::pareto && !(d.shape > 0.0)) throw InvalidParameters("pareto shape must be > 0");
  if (d.family == Family::normal && !(d.stddev > 0.0)) throw InvalidParameters("normal stddev must be > 0");
}

namespace detail {

// Draws beyond this are clamped so fixed-point sums cannot overflow.
inline constexpr double kMaxSampleValue = 1.0e9;

inline double raw_draw(const DistributionSpec& d, Rng& rng) {
  switch (d.family) {
    case Family::constant: return d.anchor;
    case Family::pareto: {
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      return d.anchor / std::pow(u, 1.0 / d.shape);
    }
    case Family::exponential: return -d.anchor * std::log(1.0 - uniform01(rng));
    case Family::normal: return std::normal_distribution<double>(d.anchor, d.stddev)(rng);
    case Family::poisson: return static_cast<double>(std::poisson_distribution<std::int64_t>(d.anchor)(rng));
  }
  return d.anchor;
}

}  // namespace detail

// Strictly positive amount. Draws that round to <= 0 are redrawn.
inline Amount sample_value(const DistributionSpec& d, Rng& rng) {
  validate(d);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double x = std::min(detail::raw_draw(d, rng), detail::kMaxSampleValue);
    const Amount a = Amount::from_double(x);
    if (a.positive()) return a;
  }
  throw InvalidParameters("distribution " + describe(d) + " does not produce positive values");
}

// Index draw, floored and clamped to [0, n-1].
inline std::size_t sample_index(const DistributionSpec& d, std::size_t n, Rng& rng) {
  const double x = std::floor(detail::raw_draw(d, rng));
  if (!(x > 0.0)) return 0;
  if (x >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<std::size_t>(x);
}

// Maps sampled indices to nodes through a seeded permutation fixed once per
// workload, so the popular indices land on arbitrary nodes.
class PairSampler {
 public:
  static constexpr int kMaxRecipientRedraws = 64;

  PairSampler(std::size_t nodes, DistributionSpec sender_dist, DistributionSpec recipient_dist, Rng& rng)
      : sender_dist_(sender_dist), recipient_dist_(recipient_dist), order_(nodes) {
    if (nodes < 2) throw InvalidParameters("pair sampling needs at least two nodes");
    validate(sender_dist, true);
    validate(recipient_dist, true);
    std::iota(order_.begin(), order_.end(), NodeId{0});
    std::shuffle(order_.begin(), order_.end(), rng);
  }

  PairSampler(std::size_t nodes, DistributionSpec dist, Rng& rng) : PairSampler(nodes, dist, dist, rng) {}

  NodeId node_at(std::size_t idx) const { return order_[idx]; }
  std::span<const NodeId> order() const { return order_; }

  std::pair<NodeId, NodeId> sample(Rng& rng) const {
    const std::size_t n = order_.size();
    const NodeId sender = order_[sample_index(sender_dist_, n, rng)];
    for (int attempt = 0; attempt < kMaxRecipientRedraws; ++attempt) {
      const NodeId recipient = order_[sample_index(recipient_dist_, n, rng)];
      if (recipient != sender) return {sender, recipient};
    }
    // Degenerate distributions (e.g. constant) fall back to a uniform other node.
    std::size_t pos = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
    NodeId recipient = order_[pos];
    if (recipient == sender) recipient = order_[n - 1];
    return {sender, recipient};
  }

 private:
  DistributionSpec sender_dist_;
  DistributionSpec recipient_dist_;
  std::vector<NodeId> order_;
};

using TxId = std::uint32_t;

struct Transaction {
  TxId id = 0;
  NodeId sender = 0;
  NodeId recipient = 0;
  Amount value;
  std::uint64_t epoch = 0;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct WorkloadParams {
  std::size_t nodes = 0;
  std::size_t count = 0;
  double v_fix = 1.0;
  DistributionSpec values;
  DistributionSpec pairs;
  std::uint64_t seed = 0;
};

struct TransactionSet {
  std::vector<Transaction> transactions;
  WorkloadParams params;

  std::size_t size() const noexcept { return transactions.size(); }
};

inline constexpr std::uint64_t kValueStream = 1;
inline constexpr std::uint64_t kPairStream = 2;

// GT(N, nt, v_fix, D_v, D_n). v_fix overrides the anchor of `values`.
// Values and pairs draw from separate derived streams.
inline TransactionSet generate_transactions(std::size_t nodes, std::size_t count, double v_fix,
                                            DistributionSpec values, DistributionSpec pairs, std::uint64_t seed) {
  if (nodes < 2) throw InvalidParameters("workload needs at least two nodes");
  if (count < 1) throw InvalidParameters("workload needs at least one transaction");
  values.anchor = v_fix;
  validate(values);
  Rng value_rng(derive_seed(seed, kValueStream));
  Rng pair_rng(derive_seed(seed, kPairStream));
  PairSampler sampler(nodes, pairs, pair_rng);

  TransactionSet set;
  set.params = WorkloadParams{nodes, count, v_fix, values, pairs, seed};
  set.transactions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Amount value = sample_value(values, value_rng);
    const auto [s, r] = sampler.sample(pair_rng);
    set.transactions.push_back(Transaction{static_cast<TxId>(i), s, r, value, i});
  }
  return set;
}

inline void write_transactions_csv(std::ostream& out, const TransactionSet& set,
                                   const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "id,sender,recipient,value,epoch\n";
  for (const auto& t : set.transactions)
    out << t.id << ',' << t.sender << ',' << t.recipient << ',' << t.value.to_string() << ',' << t.epoch << '\n';
}

inline TransactionSet parse_transactions_csv(std::istream& in) {
  TransactionSet set;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "id,sender,recipient,value,epoch") throw ParseError("unexpected transaction header", line_no);
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string f[5];
    for (auto& x : f)
      if (!std::getline(fields, x, ',')) throw ParseError("expected 5 fields", line_no);
    try {
      Transaction t;
      t.id = static_cast<TxId>(std::stoul(f[0]));
      t.sender = static_cast<NodeId>(std::stoul(f[1]));
      t.recipient = static_cast<NodeId>(std::stoul(f[2]));
      t.value = Amount::parse(f[3]);
      t.epoch = std::stoull(f[4]);
      if (t.id != set.transactions.size()) throw ParseError("transaction ids must be dense and ordered", line_no);
      if (t.sender == t.recipient) throw ParseError("sender equals recipient", line_no);
      if (!t.value.positive()) throw ParseError("non-positive value", line_no);
      set.transactions.push_back(t);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header_seen) throw ParseError("missing transaction header");
  set.params.count = set.transactions.size();
  return set;
}

inline TransactionSet load_transactions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open transaction file: " + path);
  return parse_transactions_csv(in);
}

}  // namespace pcnsim
