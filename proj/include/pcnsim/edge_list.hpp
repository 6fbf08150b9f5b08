#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"

namespace pcnsim {

// Edge-list text format, one channel per line:
//   <a> <b> <balance_ab> <balance_ba>
// '#' starts a comment. Node labels that are all non-negative integers are
// densified in numeric order (so 0..n-1 maps to itself); any other labels
// are densified in order of first appearance.
inline Graph parse_topology(std::istream& in) {
  struct Row {
    std::string a, b;
    Amount ab, ba;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 4) throw ParseError("expected '<a> <b> <balance_ab> <balance_ba>'", line_no);
    if (tok[0] == tok[1]) throw ParseError("self-loop channel on node " + tok[0], line_no);
    Row r{tok[0], tok[1], {}, {}, line_no};
    try {
      r.ab = Amount::parse(tok[2]);
      r.ba = Amount::parse(tok[3]);
    } catch (const InvalidParameters& e) {
      throw ParseError(e.what(), line_no);
    }
    if (r.ab.micros() < 0 || r.ba.micros() < 0) throw ParseError("negative balance", line_no);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("empty graph: no channels in topology file");

  auto numeric = [](const std::string& s, std::uint64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  bool all_numeric = true;
  for (const auto& r : rows) {
    std::uint64_t x;
    if (!numeric(r.a, x) || !numeric(r.b, x)) {
      all_numeric = false;
      break;
    }
  }

  std::unordered_map<std::string, NodeId> ids;
  if (all_numeric) {
    std::map<std::uint64_t, std::string> ordered;
    for (const auto& r : rows) {
      std::uint64_t x;
      numeric(r.a, x);
      ordered.emplace(x, r.a);
      numeric(r.b, x);
      ordered.emplace(x, r.b);
    }
    // Labels like "01" and "1" collapse to the same numeric id.
    std::map<std::uint64_t, NodeId> dense;
    for (const auto& [value, label] : ordered) dense.emplace(value, static_cast<NodeId>(dense.size()));
    for (const auto& r : rows) {
      std::uint64_t x;
      numeric(r.a, x);
      ids.emplace(r.a, dense.at(x));
      numeric(r.b, x);
      ids.emplace(r.b, dense.at(x));
    }
    Graph g(dense.size());
    for (const auto& r : rows) {
      const NodeId u = ids.at(r.a), v = ids.at(r.b);
      if (u == v) throw ParseError("self-loop channel on node " + r.a, r.line);
      if (g.find_channel(u, v)) throw ParseError("duplicate channel " + r.a + " " + r.b, r.line);
      g.add_channel(u, v, r.ab, r.ba);
    }
    return g;
  }

  for (const auto& r : rows) {
    ids.emplace(r.a, static_cast<NodeId>(ids.size()));
    ids.emplace(r.b, static_cast<NodeId>(ids.size()));
  }
  Graph g(ids.size());
  for (const auto& r : rows) {
    const NodeId u = ids.at(r.a), v = ids.at(r.b);
    if (g.find_channel(u, v)) throw ParseError("duplicate channel " + r.a + " " + r.b, r.line);
    g.add_channel(u, v, r.ab, r.ba);
  }
  return g;
}

inline Graph load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open topology file: " + path);
  return parse_topology(in);
}

// Writes channels in id order. `header` lines are emitted as '#' comments.
inline void write_topology(std::ostream& out, const Graph& g, const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  for (const auto& c : g.channels())
    out << c.a << ' ' << c.b << ' ' << c.balance[0].to_string() << ' ' << c.balance[1].to_string() << '\n';
}

}  // namespace pcnsim
