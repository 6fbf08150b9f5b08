#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pcnsim/adversary.hpp"
#include "pcnsim/balances.hpp"
#include "pcnsim/centrality.hpp"
#include "pcnsim/costing.hpp"
#include "pcnsim/edge_list.hpp"
#include "pcnsim/embedding.hpp"
#include "pcnsim/engine.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/generators.hpp"
#include "pcnsim/results.hpp"
#include "pcnsim/rng.hpp"
#include "pcnsim/workload.hpp"

namespace pcnsim {

enum class TopologyKind { scale_free, small_world, file };

inline std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::scale_free: return "scale_free";
    case TopologyKind::small_world: return "small_world";
    case TopologyKind::file: return "file";
  }
  return "?";
}

struct TopologySpec {
  TopologyKind kind = TopologyKind::scale_free;
  std::size_t nodes = 10000;
  std::size_t attachment = 2;
  std::size_t ring_neighbors = 20;
  double shortcut_probability = 0.01;
  std::string file = "none";
};

struct WorkloadSpec {
  std::size_t transactions = 100000;
  double v_fix = 1.0;
  DistributionSpec values{Family::pareto, 1.0, 1.16, 1.0};
  DistributionSpec pairs{Family::poisson, 1000.0, 1.0, 1.0};
};

struct BalanceSpec {
  double tc = 1.0;
  double multiplier = 0.5;
  double multiplier_probability = 0.5;
  Amount floor;
};

struct AttackSpec {
  std::optional<AttackAction> action;  // empty: no attack
  Selection selection = Selection::random;
  double fraction = 0.0;
  Duration delay = std::chrono::milliseconds(10'000);
  double grief_probability = 1.0;
  IdealMetric ideal_metric = IdealMetric::value;
};

struct CostSpec {
  FeeSchedule fees{Amount::from_units(10), Amount::from_units(10), Amount::from_units(717)};
  CostStrategy strategy = CostStrategy::centrality;
  double expected_attempts = 0.0;
  std::optional<double> channels;  // empty: measure on the dataset
};

struct ExperimentSpec {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  TopologySpec topology;
  WorkloadSpec workload;
  BalanceSpec balances;
  Router router = Router::speedymurmurs;
  std::size_t trees = 3;
  RootSelection roots = RootSelection::degree;
  AttackSpec attack;
  EngineConfig engine;  // engine.seed is derived, never read from config
  std::vector<double> sweep_fractions{0.05, 0.1, 0.2, 0.3};
  CostSpec cost;
  bool output_paths = true;
};

namespace config {

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::string format_ms(Duration d) { return pcnsim::format_ms(d); }

inline double parse_double(const std::string& key, const std::string& v) {
  double x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw InvalidParameters(key + ": expected a number, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidParameters(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

inline Duration parse_ms(const std::string& key, const std::string& v) {
  const double ms = parse_double(key, v);
  if (ms < 0 || ms > 1e12) throw InvalidParameters(key + ": out of range");
  return Duration(std::llround(ms * 1000.0));
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidParameters(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  for (std::string item; std::getline(in, item, ',');) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw InvalidParameters(key + ": empty list element");
    out.push_back(parse_double(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw InvalidParameters(key + ": empty list");
  return out;
}

inline std::string format_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
  return s;
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentSpec&)> get;
  std::function<void(ExperimentSpec&, const std::string&)> set;
};

// Every configuration key in canonical order.
inline const std::vector<Field>& fields() {
  using S = ExperimentSpec;
  using std::string;
  static const std::vector<Field> table = {
      {"seed", [](const S& s) { return std::to_string(s.seed); },
       [](S& s, const string& v) { s.seed = parse_uint("seed", v); }},
      {"output_dir", [](const S& s) { return s.output_dir; },
       [](S& s, const string& v) { s.output_dir = v; }},
      {"topology.kind", [](const S& s) { return to_string(s.topology.kind); },
       [](S& s, const string& v) {
         if (v == "scale_free") s.topology.kind = TopologyKind::scale_free;
         else if (v == "small_world") s.topology.kind = TopologyKind::small_world;
         else if (v == "file") s.topology.kind = TopologyKind::file;
         else throw InvalidParameters("topology.kind: unknown kind '" + v + "'");
       }},
      {"topology.nodes", [](const S& s) { return std::to_string(s.topology.nodes); },
       [](S& s, const string& v) { s.topology.nodes = parse_uint("topology.nodes", v); }},
      {"topology.attachment", [](const S& s) { return std::to_string(s.topology.attachment); },
       [](S& s, const string& v) { s.topology.attachment = parse_uint("topology.attachment", v); }},
      {"topology.ring_neighbors", [](const S& s) { return std::to_string(s.topology.ring_neighbors); },
       [](S& s, const string& v) { s.topology.ring_neighbors = parse_uint("topology.ring_neighbors", v); }},
      {"topology.shortcut_probability", [](const S& s) { return format_double(s.topology.shortcut_probability); },
       [](S& s, const string& v) {
         s.topology.shortcut_probability = parse_double("topology.shortcut_probability", v);
       }},
      {"topology.file", [](const S& s) { return s.topology.file; },
       [](S& s, const string& v) { s.topology.file = v; }},
      {"workload.transactions", [](const S& s) { return std::to_string(s.workload.transactions); },
       [](S& s, const string& v) { s.workload.transactions = parse_uint("workload.transactions", v); }},
      {"workload.v_fix", [](const S& s) { return format_double(s.workload.v_fix); },
       [](S& s, const string& v) { s.workload.v_fix = parse_double("workload.v_fix", v); }},
      {"workload.value_distribution", [](const S& s) { return to_string(s.workload.values.family); },
       [](S& s, const string& v) { s.workload.values.family = parse_family(v); }},
      {"workload.value_shape", [](const S& s) { return format_double(s.workload.values.shape); },
       [](S& s, const string& v) { s.workload.values.shape = parse_double("workload.value_shape", v); }},
      {"workload.value_stddev", [](const S& s) { return format_double(s.workload.values.stddev); },
       [](S& s, const string& v) { s.workload.values.stddev = parse_double("workload.value_stddev", v); }},
      {"workload.pair_distribution", [](const S& s) { return to_string(s.workload.pairs.family); },
       [](S& s, const string& v) { s.workload.pairs.family = parse_family(v); }},
      {"workload.pair_mean", [](const S& s) { return format_double(s.workload.pairs.anchor); },
       [](S& s, const string& v) { s.workload.pairs.anchor = parse_double("workload.pair_mean", v); }},
      {"workload.pair_shape", [](const S& s) { return format_double(s.workload.pairs.shape); },
       [](S& s, const string& v) { s.workload.pairs.shape = parse_double("workload.pair_shape", v); }},
      {"workload.pair_stddev", [](const S& s) { return format_double(s.workload.pairs.stddev); },
       [](S& s, const string& v) { s.workload.pairs.stddev = parse_double("workload.pair_stddev", v); }},
      {"balances.tc", [](const S& s) { return format_double(s.balances.tc); },
       [](S& s, const string& v) { s.balances.tc = parse_double("balances.tc", v); }},
      {"balances.multiplier", [](const S& s) { return format_double(s.balances.multiplier); },
       [](S& s, const string& v) { s.balances.multiplier = parse_double("balances.multiplier", v); }},
      {"balances.multiplier_probability",
       [](const S& s) { return format_double(s.balances.multiplier_probability); },
       [](S& s, const string& v) {
         s.balances.multiplier_probability = parse_double("balances.multiplier_probability", v);
       }},
      {"balances.floor", [](const S& s) { return s.balances.floor.to_string(); },
       [](S& s, const string& v) { s.balances.floor = Amount::parse(v); }},
      {"router", [](const S& s) { return to_string(s.router); },
       [](S& s, const string& v) { s.router = parse_router(v); }},
      {"trees.count", [](const S& s) { return std::to_string(s.trees); },
       [](S& s, const string& v) { s.trees = parse_uint("trees.count", v); }},
      {"trees.roots", [](const S& s) { return string(s.roots == RootSelection::degree ? "degree" : "random"); },
       [](S& s, const string& v) {
         if (v == "degree") s.roots = RootSelection::degree;
         else if (v == "random") s.roots = RootSelection::random;
         else throw InvalidParameters("trees.roots: expected degree or random");
       }},
      {"attack.action", [](const S& s) { return s.attack.action ? to_string(*s.attack.action) : string("none"); },
       [](S& s, const string& v) {
         if (v == "none") s.attack.action.reset();
         else if (v == "drop") s.attack.action = AttackAction::drop;
         else if (v == "delay") s.attack.action = AttackAction::delay;
         else throw InvalidParameters("attack.action: expected none, drop or delay");
       }},
      {"attack.selection", [](const S& s) { return to_string(s.attack.selection); },
       [](S& s, const string& v) { s.attack.selection = parse_selection(v); }},
      {"attack.fraction", [](const S& s) { return format_double(s.attack.fraction); },
       [](S& s, const string& v) { s.attack.fraction = parse_double("attack.fraction", v); }},
      {"attack.delay_ms", [](const S& s) { return format_ms(s.attack.delay); },
       [](S& s, const string& v) { s.attack.delay = parse_ms("attack.delay_ms", v); }},
      {"attack.grief_probability", [](const S& s) { return format_double(s.attack.grief_probability); },
       [](S& s, const string& v) { s.attack.grief_probability = parse_double("attack.grief_probability", v); }},
      {"attack.ideal_metric",
       [](const S& s) { return string(s.attack.ideal_metric == IdealMetric::value ? "value" : "count"); },
       [](S& s, const string& v) {
         if (v == "value") s.attack.ideal_metric = IdealMetric::value;
         else if (v == "count") s.attack.ideal_metric = IdealMetric::count;
         else throw InvalidParameters("attack.ideal_metric: expected value or count");
       }},
      {"engine.hop_delay_ms", [](const S& s) { return format_ms(s.engine.hop_delay); },
       [](S& s, const string& v) { s.engine.hop_delay = parse_ms("engine.hop_delay_ms", v); }},
      {"engine.max_concurrent", [](const S& s) { return std::to_string(s.engine.max_concurrent); },
       [](S& s, const string& v) { s.engine.max_concurrent = parse_uint("engine.max_concurrent", v); }},
      {"engine.arrival_interval_ms", [](const S& s) { return format_ms(s.engine.arrival_interval); },
       [](S& s, const string& v) { s.engine.arrival_interval = parse_ms("engine.arrival_interval_ms", v); }},
      {"engine.timeout_ms", [](const S& s) { return format_ms(s.engine.timeout); },
       [](S& s, const string& v) { s.engine.timeout = parse_ms("engine.timeout_ms", v); }},
      {"engine.window", [](const S& s) { return std::to_string(s.engine.window); },
       [](S& s, const string& v) { s.engine.window = parse_uint("engine.window", v); }},
      {"engine.channel_slots", [](const S& s) { return std::to_string(s.engine.channel_slots); },
       [](S& s, const string& v) { s.engine.channel_slots = parse_uint("engine.channel_slots", v); }},
      {"engine.max_replans", [](const S& s) { return std::to_string(s.engine.max_replans); },
       [](S& s, const string& v) { s.engine.max_replans = parse_uint("engine.max_replans", v); }},
      {"sweep.fractions", [](const S& s) { return format_list(s.sweep_fractions); },
       [](S& s, const string& v) { s.sweep_fractions = parse_list("sweep.fractions", v); }},
      {"cost.f_open", [](const S& s) { return s.cost.fees.f_open.to_string(); },
       [](S& s, const string& v) { s.cost.fees.f_open = Amount::parse(v); }},
      {"cost.f_close", [](const S& s) { return s.cost.fees.f_close.to_string(); },
       [](S& s, const string& v) { s.cost.fees.f_close = Amount::parse(v); }},
      {"cost.cap", [](const S& s) { return s.cost.fees.cap.to_string(); },
       [](S& s, const string& v) { s.cost.fees.cap = Amount::parse(v); }},
      {"cost.strategy", [](const S& s) { return to_string(s.cost.strategy); },
       [](S& s, const string& v) { s.cost.strategy = parse_cost_strategy(v); }},
      {"cost.expected_attempts", [](const S& s) { return format_double(s.cost.expected_attempts); },
       [](S& s, const string& v) { s.cost.expected_attempts = parse_double("cost.expected_attempts", v); }},
      {"cost.channels", [](const S& s) { return s.cost.channels ? format_double(*s.cost.channels) : string("measure"); },
       [](S& s, const string& v) {
         if (v == "measure") s.cost.channels.reset();
         else s.cost.channels = parse_double("cost.channels", v);
       }},
      {"output.paths", [](const S& s) { return string(s.output_paths ? "true" : "false"); },
       [](S& s, const string& v) { s.output_paths = parse_bool("output.paths", v); }},
  };
  return table;
}

inline const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace config

// Cross-field checks shared by every command.
inline void validate(const ExperimentSpec& s) {
  const auto& t = s.topology;
  if (t.kind != TopologyKind::file && t.nodes < 2) throw InvalidParameters("topology.nodes must be >= 2");
  if (t.kind == TopologyKind::scale_free && (t.attachment < 1 || t.nodes <= t.attachment))
    throw InvalidParameters("scale-free topology needs 1 <= attachment < nodes");
  if (t.kind == TopologyKind::small_world) {
    if (t.ring_neighbors < 2 || t.ring_neighbors % 2 != 0 || t.nodes <= t.ring_neighbors)
      throw InvalidParameters("small-world topology needs an even ring_neighbors >= 2 below nodes");
    if (!(t.shortcut_probability >= 0.0 && t.shortcut_probability <= 1.0))
      throw InvalidParameters("topology.shortcut_probability must lie in [0, 1]");
  }
  if (t.kind == TopologyKind::file && (t.file.empty() || t.file == "none"))
    throw InvalidParameters("topology.kind=file needs topology.file");
  if (s.workload.transactions < 1) throw InvalidParameters("workload.transactions must be >= 1");
  if (!(s.workload.v_fix > 0.0)) throw InvalidParameters("workload.v_fix must be positive");
  DistributionSpec values = s.workload.values;
  values.anchor = s.workload.v_fix;
  validate(values);
  validate(s.workload.pairs, true);
  if (!(s.balances.tc > 0.0 && s.balances.tc <= 1.0)) throw InvalidParameters("balances.tc must lie in (0, 1]");
  if (!(s.balances.multiplier > 0.0 && s.balances.multiplier <= 1.0))
    throw InvalidParameters("balances.multiplier must lie in (0, 1]");
  if (!(s.balances.multiplier_probability >= 0.0 && s.balances.multiplier_probability <= 1.0))
    throw InvalidParameters("balances.multiplier_probability must lie in [0, 1]");
  if (s.balances.floor < Amount{}) throw InvalidParameters("balances.floor must be >= 0");
  if (s.trees < 1) throw InvalidParameters("trees.count must be >= 1");
  AttackConfig ac;
  ac.fraction = s.attack.fraction;
  ac.delay = s.attack.delay;
  ac.grief_probability = s.attack.grief_probability;
  validate(ac);
  if (s.router == Router::ford_fulkerson && s.attack.action && s.attack.selection == Selection::tree &&
      s.attack.fraction > 0)
    throw InvalidParameters("tree-based attacker selection needs the speedymurmurs router");
  validate(s.engine);
  for (double f : s.sweep_fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidParameters("sweep.fractions must lie in [0, 1]");
  validate(s.cost.fees);
  if (!(s.cost.expected_attempts >= 0.0)) throw InvalidParameters("cost.expected_attempts must be >= 0");
  if (s.cost.channels && !(*s.cost.channels >= 0.0)) throw InvalidParameters("cost.channels must be >= 0");
  if (s.output_dir.empty()) throw InvalidParameters("output_dir must not be empty");
}

// Reads `key = value` lines; '#' starts a comment. Every key must appear
// exactly once.
inline ExperimentSpec parse_spec(std::istream& in, const std::vector<std::string>& overrides = {}) {
  std::map<std::string, std::pair<std::string, std::size_t>> seen;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!config::find_field(key)) throw ParseError("unknown key '" + key + "'", line_no);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);
    if (!seen.emplace(key, std::pair{value, line_no}).second) throw ParseError("duplicate key '" + key + "'", line_no);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw InvalidParameters("override must be key=value: " + o);
    const std::string key = trim(o.substr(0, eq));
    if (!config::find_field(key)) throw InvalidParameters("unknown key '" + key + "'");
    seen[key] = {trim(o.substr(eq + 1)), 0};
  }
  ExperimentSpec spec;
  for (const auto& f : config::fields()) {
    auto it = seen.find(f.key);
    if (it == seen.end()) throw InvalidParameters("missing key '" + f.key + "'");
    try {
      f.set(spec, it->second.first);
    } catch (const ParseError&) {
      throw;
    } catch (const InvalidParameters& e) {
      if (it->second.second > 0) throw ParseError(f.key + ": " + e.what(), it->second.second);
      throw;
    }
  }
  validate(spec);
  return spec;
}

inline ExperimentSpec load_spec(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open config file: " + path);
  return parse_spec(in, overrides);
}

// Canonical `key = value` lines; parse_spec of these yields the same spec.
inline std::vector<std::string> spec_lines(const ExperimentSpec& s) {
  std::vector<std::string> out;
  for (const auto& f : config::fields()) out.push_back(f.key + " = " + f.get(s));
  return out;
}

inline std::string render_spec(const ExperimentSpec& s) {
  std::string out;
  for (const auto& l : spec_lines(s)) out += l + '\n';
  return out;
}

inline bool is_dataset_key(const std::string& key) {
  return key == "seed" || key.starts_with("topology.") || key.starts_with("workload.") ||
         key.starts_with("balances.");
}

// FNV-1a over the dataset-defining keys; ties result files to their dataset.
inline std::string dataset_fingerprint(const ExperimentSpec& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : config::fields()) {
    if (!is_dataset_key(f.key)) continue;
    for (char c : f.key + "=" + f.get(s) + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::vector<std::string> provenance_header(const ExperimentSpec& s, const std::vector<std::string>& extra = {}) {
  std::vector<std::string> h{"pcnsim", "dataset_fingerprint = " + dataset_fingerprint(s)};
  for (const auto& l : spec_lines(s)) h.push_back(l);
  for (const auto& e : extra) h.push_back(e);
  return h;
}

struct Dataset {
  Graph graph;  // channels carry the initial balances
  TransactionSet transactions;
  std::vector<RecordedPath> paths;
};

inline Dataset build_dataset(const ExperimentSpec& s) {
  validate(s);
  Dataset ds;
  const auto& t = s.topology;
  switch (t.kind) {
    case TopologyKind::scale_free:
      ds.graph = generate_scale_free(t.nodes, t.attachment, derive_seed(s.seed, Stream::topology));
      break;
    case TopologyKind::small_world:
      ds.graph = generate_small_world(t.nodes, t.ring_neighbors, t.shortcut_probability,
                                      derive_seed(s.seed, Stream::topology));
      break;
    case TopologyKind::file:
      ds.graph = load_topology(t.file);
      break;
  }
  ds.transactions = generate_transactions(ds.graph.node_count(), s.workload.transactions, s.workload.v_fix,
                                          s.workload.values, s.workload.pairs, derive_seed(s.seed, Stream::workload));
  auto b = compute_initial_balances(ds.transactions, ds.graph, s.balances.tc, derive_seed(s.seed, Stream::balances));
  b = apply_multiplier(std::move(b), s.balances.multiplier, s.balances.multiplier_probability,
                       derive_seed(s.seed, Stream::multiplier));
  b = apply_floor(std::move(b), s.balances.floor);
  assign_balances(ds.graph, b);
  ds.paths = std::move(b.paths);
  return ds;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace detail

inline std::vector<std::filesystem::path> write_dataset(const ExperimentSpec& s, const Dataset& ds) {
  namespace fs = std::filesystem;
  const fs::path dir(s.output_dir);
  fs::create_directories(dir);
  const auto header = provenance_header(s);
  std::vector<fs::path> written;
  auto emit = [&](const char* name, auto&& writer) {
    const fs::path p = dir / name;
    auto out = detail::open_output(p);
    writer(out);
    detail::finish_output(out, p);
    written.push_back(p);
  };
  emit("topology.txt", [&](std::ostream& o) { write_topology(o, ds.graph, header); });
  emit("transactions.csv", [&](std::ostream& o) { write_transactions_csv(o, ds.transactions, header); });
  if (s.output_paths) emit("paths.csv", [&](std::ostream& o) { write_paths_csv(o, ds.paths, header); });
  return written;
}

inline std::string read_fingerprint(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidParameters("cannot open " + p.string() + " (run generate first)");
  const std::string tag = "# dataset_fingerprint = ";
  for (std::string line; std::getline(in, line) && line.starts_with("#");)
    if (line.starts_with(tag)) return line.substr(tag.size());
  return {};
}

// Loads a generated dataset and checks it was generated from the same
// dataset-defining keys.
inline Dataset load_dataset(const ExperimentSpec& s) {
  namespace fs = std::filesystem;
  const fs::path dir(s.output_dir);
  const std::string want = dataset_fingerprint(s);
  for (const char* name : {"topology.txt", "transactions.csv"}) {
    const auto got = read_fingerprint(dir / name);
    if (got != want)
      throw InvalidParameters("config mismatch: " + (dir / name).string() + " was generated from a different dataset config");
  }
  Dataset ds;
  ds.graph = load_topology((dir / "topology.txt").string());
  ds.transactions = load_transactions((dir / "transactions.csv").string());
  for (const auto& t : ds.transactions.transactions)
    if (t.sender >= ds.graph.node_count() || t.recipient >= ds.graph.node_count())
      throw InvalidParameters("transaction endpoint outside topology");
  return ds;
}

struct RunOutput {
  ExperimentResult result;
  AdversarySet adversaries;
};

inline std::optional<TreeSet> trees_for(const ExperimentSpec& s, const Graph& g) {
  if (s.router != Router::speedymurmurs) return std::nullopt;
  return build_trees(g, s.trees, derive_seed(s.seed, Stream::trees), s.roots);
}

inline EngineConfig engine_config(const ExperimentSpec& s) {
  EngineConfig c = s.engine;
  c.seed = derive_seed(s.seed, Stream::engine);
  return c;
}

// Adversaries for the config's attack block. `scores` may carry precomputed
// betweenness; `profile_pass` supplies the attack-free relay profile.
inline AdversarySet select_adversaries(const ExperimentSpec& s, const Graph& g, const std::optional<TreeSet>& trees,
                                       const std::vector<double>* scores,
                                       const std::function<RelayProfile()>& profile_pass) {
  const double f = s.attack.fraction;
  switch (s.attack.selection) {
    case Selection::random: return select_random(g, f, derive_seed(s.seed, Stream::attack));
    case Selection::centrality:
      if (scores) return select_centrality(*scores, f);
      return select_centrality(g, f);
    case Selection::tree: {
      if (trees) return select_tree_depth(*trees, f, g.node_count());
      return select_tree_depth(build_trees(g, s.trees, derive_seed(s.seed, Stream::trees), s.roots), f,
                               g.node_count());
    }
    case Selection::ideal: return select_ideal(profile_pass(), f, g.node_count(), s.attack.ideal_metric);
  }
  throw InvalidParameters("unknown selection");
}

inline RunOutput run_spec(const ExperimentSpec& s, const Dataset& ds, const std::vector<double>* scores = nullptr,
                          const EngineHooks& hooks = {}) {
  validate(s);
  auto trees = trees_for(s, ds.graph);
  const EngineConfig cfg = engine_config(s);
  RunOutput out;
  std::optional<ActiveAttack> attack;
  if (s.attack.action) {
    auto profile_pass = [&] {
      return run_experiment(ds.graph, ds.transactions, s.router, trees, std::nullopt, cfg).relay_profile;
    };
    out.adversaries = select_adversaries(s, ds.graph, trees, scores, profile_pass);
    AttackConfig ac;
    ac.action = *s.attack.action;
    ac.selection = s.attack.selection;
    ac.fraction = s.attack.fraction;
    ac.delay = s.attack.delay;
    ac.grief_probability = s.attack.grief_probability;
    ac.ideal_metric = s.attack.ideal_metric;
    ac.seed = derive_seed(s.seed, Stream::attack);
    attack = ActiveAttack{ac, out.adversaries};
  }
  out.result = run_experiment(ds.graph, ds.transactions, s.router, std::move(trees), attack, cfg, hooks);
  return out;
}

inline std::string adversary_line(const RunOutput& r) {
  if (r.adversaries.provenance().empty()) return "adversaries = none";
  return "adversaries = " + r.adversaries.provenance() + " count=" + std::to_string(r.adversaries.size());
}

inline std::string fraction_tag(double f) { return config::format_double(f); }

inline std::vector<std::filesystem::path> write_run(const ExperimentSpec& s, const RunOutput& r,
                                                    const std::string& suffix = {}) {
  namespace fs = std::filesystem;
  const fs::path dir(s.output_dir);
  fs::create_directories(dir);
  const auto header = provenance_header(s, {adversary_line(r)});
  const fs::path results = dir / ("results" + suffix + ".csv");
  const fs::path relay = dir / ("relay_profile" + suffix + ".csv");
  auto out = detail::open_output(results);
  write_results_csv(out, r.result, header);
  detail::finish_output(out, results);
  auto rel = detail::open_output(relay);
  write_relay_profile_csv(rel, r.result.relay_profile, header);
  detail::finish_output(rel, relay);
  return {results, relay};
}

struct SweepRow {
  double fraction;
  double final_ratio;
  std::size_t failures;
};

inline std::vector<SweepRow> run_sweep(const ExperimentSpec& s, const Dataset& ds,
                                       std::vector<std::filesystem::path>* written = nullptr) {
  if (!s.attack.action) throw InvalidParameters("sweep needs attack.action drop or delay");
  std::vector<double> scores;
  if (s.attack.selection == Selection::centrality) scores = betweenness_centrality(ds.graph);
  std::vector<SweepRow> rows;
  for (double f : s.sweep_fractions) {
    ExperimentSpec one = s;
    one.attack.fraction = f;
    const auto r = run_spec(one, ds, scores.empty() ? nullptr : &scores);
    const auto files = write_run(one, r, "_" + fraction_tag(f));
    if (written) written->insert(written->end(), files.begin(), files.end());
    rows.push_back({f, r.result.smoothed.empty() ? 0.0 : r.result.smoothed.back(), r.result.failures()});
  }
  const auto path = std::filesystem::path(s.output_dir) / "sweep_summary.csv";
  auto out = detail::open_output(path);
  for (const auto& h : provenance_header(s)) out << "# " << h << '\n';
  out << "fraction,final_ratio,failures\n";
  for (const auto& r : rows) out << fraction_tag(r.fraction) << ',' << format_ratio(r.final_ratio) << ',' << r.failures << '\n';
  detail::finish_output(out, path);
  if (written) written->push_back(path);
  return rows;
}

// Channel count from the spec, or measured on the dataset's adversary set
// for the configured strategy and attack.fraction.
inline CostReport run_cost(const ExperimentSpec& s, const Dataset* ds) {
  double channels = 0;
  if (s.cost.channels) {
    channels = *s.cost.channels;
  } else {
    if (!ds) throw InvalidParameters("cost.channels=measure needs a generated dataset");
    AdversarySet adv;
    if (s.cost.strategy == CostStrategy::centrality) {
      adv = select_centrality(ds->graph, s.attack.fraction);
    } else {
      adv = select_tree_depth(build_trees(ds->graph, s.trees, derive_seed(s.seed, Stream::trees), s.roots),
                              s.attack.fraction, ds->graph.node_count());
    }
    channels = static_cast<double>(measure_attack_channels(adv, ds->graph));
  }
  return make_cost_report(s.cost.strategy, channels, s.cost.expected_attempts, s.cost.fees);
}

inline std::filesystem::path write_cost(const ExperimentSpec& s, const CostReport& r) {
  const std::filesystem::path dir(s.output_dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "cost.csv";
  auto out = detail::open_output(path);
  write_cost_csv(out, r, provenance_header(s));
  detail::finish_output(out, path);
  return path;
}

}  // namespace pcnsim
