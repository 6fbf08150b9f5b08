#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "pcnsim/adversary.hpp"
#include "pcnsim/amount.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"

namespace pcnsim {

struct FeeSchedule {
  Amount f_open;
  Amount f_close;
  Amount cap;
};

inline void validate(const FeeSchedule& f) {
  if (f.f_open < Amount{} || f.f_close < Amount{} || f.cap < Amount{})
    throw InvalidParameters("fees and capacity must be non-negative");
}

enum class CostStrategy { centrality, tree };

inline std::string to_string(CostStrategy s) { return s == CostStrategy::centrality ? "centrality" : "tree"; }

inline CostStrategy parse_cost_strategy(const std::string& s) {
  if (s == "centrality") return CostStrategy::centrality;
  if (s == "tree") return CostStrategy::tree;
  throw InvalidParameters("unknown cost strategy: " + s);
}

struct CostReport {
  CostStrategy strategy = CostStrategy::centrality;
  double channel_count = 0;
  double expected_attempts = 0;
  FeeSchedule fees;
  Amount total;
};

// Fractional channel counts (averages over runs) are allowed; the product is
// rounded to the nearest micro-unit.
inline Amount cost_centrality(double channels, const FeeSchedule& fees) {
  validate(fees);
  if (!(channels >= 0.0)) throw InvalidParameters("channel count must be non-negative");
  return Amount::from_double(channels * (fees.f_open + fees.cap).to_double());
}

inline Amount cost_tree(double channels, double expected_attempts, const FeeSchedule& fees) {
  validate(fees);
  if (!(channels >= 0.0)) throw InvalidParameters("channel count must be non-negative");
  if (!(expected_attempts >= 0.0)) throw InvalidParameters("expected attempts must be non-negative");
  return cost_centrality(channels, fees) +
         Amount::from_double(expected_attempts * (fees.f_open + fees.f_close).to_double());
}

// Channels with at least one adversarial endpoint.
inline std::size_t measure_attack_channels(const AdversarySet& adversaries, const Graph& g) {
  std::size_t k = 0;
  for (const auto& c : g.channels()) k += (adversaries.contains(c.a) || adversaries.contains(c.b)) ? 1 : 0;
  return k;
}

inline CostReport make_cost_report(CostStrategy strategy, double channels, double expected_attempts,
                                   const FeeSchedule& fees) {
  CostReport r{strategy, channels, expected_attempts, fees, {}};
  r.total = strategy == CostStrategy::centrality ? cost_centrality(channels, fees)
                                                 : cost_tree(channels, expected_attempts, fees);
  return r;
}

inline void write_cost_csv(std::ostream& out, const CostReport& r, const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "strategy,channel_count,expected_attempts,f_open,f_close,cap,total\n";
  out << to_string(r.strategy) << ',' << r.channel_count << ',' << r.expected_attempts << ',' << r.fees.f_open << ','
      << r.fees.f_close << ',' << r.fees.cap << ',' << r.total << '\n';
}

}  // namespace pcnsim
