#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcnsim/engine.hpp"
#include "pcnsim/error.hpp"

namespace pcnsim {

inline constexpr const char* kResultsHeader = "epoch,txid,success,reason,start_ms,end_ms,smoothed_ratio";
inline constexpr const char* kRelayHeader = "node,forward_count,forward_value";

// Virtual microseconds as milliseconds with three decimals.
inline std::string format_ms(Duration t) {
  const auto us = t.count();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(us / 1000), static_cast<long long>(us % 1000));
  return buf;
}

inline std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9f", r);
  return buf;
}

inline void write_results_csv(std::ostream& out, const ExperimentResult& r, const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << kResultsHeader << '\n';
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& e = r.records[i];
    out << e.epoch << ',' << e.txid << ',' << (e.success ? 1 : 0) << ',' << to_string(e.reason) << ','
        << format_ms(e.start) << ',' << format_ms(e.end) << ',' << format_ratio(r.smoothed[i]) << '\n';
  }
}

inline void write_relay_profile_csv(std::ostream& out, const RelayProfile& p,
                                    const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << kRelayHeader << '\n';
  for (std::size_t v = 0; v < p.size(); ++v) out << v << ',' << p[v].count << ',' << p[v].value << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::istringstream in(line);
  for (std::string x; std::getline(in, x, ',');) f.push_back(x);
  return f;
}

}  // namespace detail

inline RelayProfile parse_relay_profile_csv(std::istream& in) {
  RelayProfile p;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kRelayHeader) throw ParseError("unexpected relay-profile header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
    try {
      if (std::stoull(f[0]) != p.size()) throw ParseError("node ids must be dense and ordered", line_no);
      p.push_back(RelayStats{std::stoull(f[1]), Amount::parse(f[2])});
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header_seen) throw ParseError("missing relay-profile header");
  return p;
}

// Success flags and smoothed ratios of a results file, in file order.
struct ResultSeries {
  std::vector<bool> success;
  std::vector<double> smoothed;
};

inline ResultSeries parse_results_csv(std::istream& in) {
  ResultSeries s;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kResultsHeader) throw ParseError("unexpected results header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 7) throw ParseError("expected 7 fields", line_no);
    if (f[2] != "0" && f[2] != "1") throw ParseError("success must be 0 or 1", line_no);
    s.success.push_back(f[2] == "1");
    try {
      s.smoothed.push_back(std::stod(f[6]));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header_seen) throw ParseError("missing results header");
  return s;
}

}  // namespace pcnsim
