#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "pcnsim/adversary.hpp"
#include "pcnsim/embedding.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/ledger.hpp"
#include "pcnsim/rng.hpp"
#include "pcnsim/routing.hpp"
#include "pcnsim/workload.hpp"

namespace pcnsim {

using namespace std::chrono_literals;

enum class Router { speedymurmurs, ford_fulkerson };

inline std::string to_string(Router r) { return r == Router::speedymurmurs ? "speedymurmurs" : "fordfulkerson"; }

inline Router parse_router(const std::string& s) {
  if (s == "speedymurmurs" || s == "sm") return Router::speedymurmurs;
  if (s == "fordfulkerson" || s == "ford-fulkerson" || s == "ff") return Router::ford_fulkerson;
  throw InvalidParameters("unknown router: " + s);
}

enum class FailureReason { none, stuck, dropped, insufficient_flow, timeout };

inline std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::stuck: return "stuck";
    case FailureReason::dropped: return "dropped";
    case FailureReason::insufficient_flow: return "insufficient_flow";
    case FailureReason::timeout: return "timeout";
  }
  return "?";
}

struct EngineConfig {
  Duration hop_delay = 30ms;
  std::size_t max_concurrent = 4096;
  Duration arrival_interval = 5ms;
  Duration timeout = 0ms;  // zero disables the commitment timeout
  std::size_t window = 1500;
  std::size_t max_replans = 16;  // Ford-Fulkerson re-plans after lock conflicts
  std::size_t channel_slots = 32;  // concurrent payments per channel, 0 = unlimited
  std::uint64_t seed = 0;
};

inline void validate(const EngineConfig& c) {
  if (c.hop_delay.count() <= 0) throw InvalidParameters("hop delay must be positive");
  if (c.max_concurrent < 1) throw InvalidParameters("max_concurrent must be >= 1");
  if (c.arrival_interval.count() < 0) throw InvalidParameters("arrival interval must be >= 0");
  if (c.timeout.count() < 0) throw InvalidParameters("timeout must be >= 0");
  if (c.window < 1) throw InvalidParameters("smoothing window must be >= 1");
}

struct EpochRecord {
  std::uint64_t epoch = 0;
  TxId txid = 0;
  bool success = false;
  FailureReason reason = FailureReason::none;
  Duration start{0};
  Duration end{0};
  std::size_t hops_locked = 0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct EngineStats {
  std::uint64_t events = 0;
  std::uint64_t rebalances = 0;
  std::uint64_t replans = 0;
  Duration finish_time{0};
};

struct ExperimentResult {
  std::vector<EpochRecord> records;
  std::vector<double> smoothed;
  RelayProfile relay_profile;
  Graph final_state;
  EngineStats stats;

  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& r : records) f += r.success ? 0 : 1;
    return f;
  }
};

struct ActiveAttack {
  AttackConfig config;
  AdversarySet adversaries;
};

// Observation points for tests; both default to no-ops.
struct EngineHooks {
  std::function<void(TxId, const Graph&)> on_start;
  std::function<void(const EpochRecord&, const Graph&)> on_finish;
};

// Trailing mean of the success indicator over [max(0, i - window + 1), i].
inline std::vector<double> success_ratio_series(std::span<const EpochRecord> records, std::size_t window = 1500) {
  if (window < 1) throw InvalidParameters("smoothing window must be >= 1");
  std::vector<double> out(records.size());
  std::size_t successes = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    successes += records[i].success ? 1 : 0;
    if (i >= window) successes -= records[i - window].success ? 1 : 0;
    const std::size_t len = std::min(i + 1, window);
    out[i] = static_cast<double>(successes) / static_cast<double>(len);
  }
  return out;
}

// Least-squares slope of y against its index.
inline double trend_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const double mean_x = static_cast<double>(n - 1) / 2.0;
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    num += dx * (y[i] - mean_y);
    den += dx * dx;
  }
  return num / den;
}

namespace detail {

// Single-threaded discrete-event executor. Payments are logically
// concurrent; every mutation happens inside one event handler, and events
// are totally ordered by (time, insertion sequence).
class Simulation {
 public:
  Simulation(Graph graph, const TransactionSet& txs, Router router, std::optional<TreeSet> trees,
             const std::optional<ActiveAttack>& attack, const EngineConfig& cfg, const EngineHooks& hooks)
      : graph_(std::move(graph)),
        ledger_(graph_, cfg.channel_slots),
        txs_(txs),
        router_(router),
        trees_(std::move(trees)),
        attack_(attack),
        cfg_(cfg),
        hooks_(hooks),
        share_rng_(derive_seed(cfg.seed, Stream::engine)),
        grief_rng_(derive_seed(cfg.seed, Stream::grief)) {
    validate(cfg_);
    if (router_ == Router::speedymurmurs && !trees_) throw InvalidParameters("SpeedyMurmurs needs spanning trees");
    if (router_ == Router::ford_fulkerson && trees_)
      throw InvalidParameters("Ford-Fulkerson runs must not carry spanning trees");
    if (trees_) {
      if (trees_->size() == 0) throw InvalidParameters("empty tree set");
      for (const auto& t : trees_->trees)
        if (t.node_count() != graph_.node_count()) throw InvalidParameters("trees do not match graph");
    }
    if (attack_) {
      validate(attack_->config);
      for (NodeId v : attack_->adversaries.nodes())
        if (v >= graph_.node_count()) throw InvalidParameters("adversary outside graph");
    }
    for (const auto& t : txs_.transactions) {
      if (t.sender >= graph_.node_count() || t.recipient >= graph_.node_count() || t.sender == t.recipient ||
          !t.value.positive())
        throw InvalidParameters("invalid transaction " + std::to_string(t.id));
    }
    payments_.resize(txs_.size());
    records_.resize(txs_.size());
    relay_.assign(graph_.node_count(), {});
  }

  ExperimentResult run() {
    if (!txs_.transactions.empty()) push(Duration{0}, Kind::arrival, 0, 0);
    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      PCNSIM_ENSURE(e.time >= now_, "virtual clock moved backwards");
      now_ = e.time;
      ++stats_.events;
      dispatch(e);
    }
    PCNSIM_ENSURE(ledger_.open_payments() == 0, "locks outlived their payments");
    stats_.finish_time = now_;
    ExperimentResult out;
    out.smoothed = success_ratio_series(records_, cfg_.window);
    out.records = std::move(records_);
    out.relay_profile = std::move(relay_);
    out.final_state = std::move(graph_);
    out.stats = stats_;
    return out;
  }

 private:
  enum class Kind : std::uint8_t { arrival, share_step, path_step, settle, timeout };
  enum class Status : std::uint8_t { waiting, commitment, settlement, done };

  struct Event {
    Duration time;
    std::uint64_t seq;
    Kind kind;
    TxId tx;
    std::uint32_t index;

    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  // One share (SpeedyMurmurs) or one augmenting path (Ford-Fulkerson).
  struct Route {
    std::size_t tree = 0;
    Amount amount;
    NodeId at = kNoNode;
    std::vector<NodeId> nodes;         // Ford-Fulkerson plan
    std::vector<ChannelId> channels;   // Ford-Fulkerson plan
    std::size_t next = 0;              // Ford-Fulkerson hop cursor
    std::vector<std::uint32_t> locks;  // ledger indices, in hop order
    std::size_t hops = 0;
    bool delivered = false;
    bool abandoned = false;
  };

  struct Payment {
    Status status = Status::waiting;
    std::vector<Route> routes;
    std::size_t in_flight = 0;
    std::size_t unsettled = 0;
    std::size_t replans = 0;
  };

  auto admits(TxId tx) const {
    return [this, tx](ChannelId c) { return ledger_.admits(c, tx); };
  }

  void push(Duration t, Kind k, TxId tx, std::uint32_t index) { events_.push(Event{t, seq_++, k, tx, index}); }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case Kind::arrival: return on_arrival(e.tx);
      case Kind::share_step: return on_share_step(e.tx, e.index);
      case Kind::path_step: return on_path_step(e.tx, e.index);
      case Kind::settle: return on_settle(e.tx, e.index);
      case Kind::timeout: return on_timeout(e.tx);
    }
  }

  void on_arrival(TxId tx) {
    if (tx + 1 < txs_.size()) push(cfg_.arrival_interval * static_cast<std::int64_t>(tx + 1), Kind::arrival, tx + 1, 0);
    if (active_ < cfg_.max_concurrent) start(tx);
    else waiting_.push_back(tx);
  }

  void start(TxId tx) {
    ++active_;
    const Transaction& t = txs_.transactions[tx];
    Payment& p = payments_[tx];
    p.status = Status::commitment;
    EpochRecord& rec = records_[tx];
    rec.epoch = t.epoch;
    rec.txid = t.id;
    rec.start = now_;
    if (hooks_.on_start) hooks_.on_start(tx, graph_);
    if (cfg_.timeout.count() > 0) push(now_ + cfg_.timeout, Kind::timeout, tx, 0);

    if (router_ == Router::speedymurmurs) {
      const auto shares = split_payment(t.value, trees_->size(), share_rng_);
      p.routes.resize(shares.size());
      for (std::size_t i = 0; i < shares.size(); ++i) {
        Route& r = p.routes[i];
        r.tree = shares[i].tree;
        r.amount = shares[i].amount;
        r.at = t.sender;
        if (r.amount.is_zero()) {
          r.delivered = true;
          continue;
        }
        ++p.in_flight;
        push(now_, Kind::share_step, tx, static_cast<std::uint32_t>(i));
      }
      if (p.in_flight == 0) begin_settlement(tx);
      return;
    }

    FlowPlan plan = plan_max_flow(graph_, t.sender, t.recipient, t.value, flow_ws_, admits(tx));
    if (plan.total < t.value) return fail(tx, FailureReason::insufficient_flow);
    add_paths(tx, std::move(plan));
  }

  void add_paths(TxId tx, FlowPlan plan) {
    Payment& p = payments_[tx];
    for (auto& fp : plan.paths) {
      Route r;
      r.amount = fp.amount;
      r.nodes = std::move(fp.nodes);
      r.channels = std::move(fp.channels);
      r.at = r.nodes.front();
      p.routes.push_back(std::move(r));
      ++p.in_flight;
      push(now_, Kind::path_step, tx, static_cast<std::uint32_t>(p.routes.size() - 1));
    }
  }

  // Adversary check on a commitment hop towards `to`. Returns the extra delay,
  // or nullopt when the payment was dropped.
  std::optional<Duration> screen_hop(TxId tx, NodeId to) {
    if (!attack_ || to == txs_.transactions[tx].recipient) return Duration{0};
    const Interception i = intercept(to, Phase::commitment, attack_->adversaries, attack_->config, grief_rng_);
    if (i.verdict == Verdict::drop) {
      fail(tx, FailureReason::dropped);
      return std::nullopt;
    }
    return i.delay;
  }

  void note_relay(TxId tx, NodeId from, Amount amount) {
    if (from == txs_.transactions[tx].sender) return;
    ++relay_[from].count;
    relay_[from].value += amount;
  }

  void on_share_step(TxId tx, std::uint32_t index) {
    Payment& p = payments_[tx];
    if (p.status != Status::commitment) return;
    const Transaction& t = txs_.transactions[tx];
    Route& r = p.routes[index];
    if (r.at == t.recipient) {
      r.delivered = true;
      if (--p.in_flight == 0) begin_settlement(tx);
      return;
    }
    const SpanningTree& tree = trees_->trees[r.tree];
    if (!tree.contains(t.recipient) || r.hops >= graph_.node_count()) return fail(tx, FailureReason::stuck);
    const auto hop = next_hop_sm(graph_, tree, r.at, tree.coords[t.recipient], r.amount, admits(tx));
    if (!hop) return fail(tx, FailureReason::stuck);
    const auto extra = screen_hop(tx, hop->node);
    if (!extra) return;
    const Direction d = graph_.channel(hop->channel).direction_from(r.at);
    const LockResult locked = ledger_.lock(hop->channel, d, r.amount, tx);
    PCNSIM_ENSURE(locked == LockResult::ok, "next hop lost its liquidity");
    r.locks.push_back(static_cast<std::uint32_t>(ledger_.locks(tx).size() - 1));
    note_relay(tx, r.at, r.amount);
    r.at = hop->node;
    ++r.hops;
    push(now_ + cfg_.hop_delay + *extra, Kind::share_step, tx, index);
  }

  void on_path_step(TxId tx, std::uint32_t index) {
    Payment& p = payments_[tx];
    if (p.status != Status::commitment) return;
    Route& r = p.routes[index];
    if (r.next + 1 == r.nodes.size()) {
      r.delivered = true;
      if (--p.in_flight == 0) begin_settlement(tx);
      return;
    }
    const NodeId from = r.nodes[r.next];
    const NodeId to = r.nodes[r.next + 1];
    const ChannelId ch = r.channels[r.next];
    const auto extra = screen_hop(tx, to);
    if (!extra) return;
    const Direction d = graph_.channel(ch).direction_from(from);
    if (ledger_.lock(ch, d, r.amount, tx) != LockResult::ok) return replan(tx, index);
    // `r` stays valid: no routes were added since it was taken.
    r.locks.push_back(static_cast<std::uint32_t>(ledger_.locks(tx).size() - 1));
    note_relay(tx, from, r.amount);
    ++r.next;
    ++r.hops;
    push(now_ + cfg_.hop_delay + *extra, Kind::path_step, tx, index);
  }

  // A concurrent payment took liquidity this path relied on: release its
  // locks and search again for its amount on the current state.
  void replan(TxId tx, std::uint32_t index) {
    Payment& p = payments_[tx];
    Route& r = p.routes[index];
    for (auto i : r.locks) ledger_.release_lock(tx, i);
    r.locks.clear();
    r.abandoned = true;
    --p.in_flight;
    ++stats_.replans;
    if (++p.replans > cfg_.max_replans) return fail(tx, FailureReason::insufficient_flow);
    const Transaction& t = txs_.transactions[tx];
    const Amount amount = r.amount;
    FlowPlan plan = plan_max_flow(graph_, t.sender, t.recipient, amount, flow_ws_, admits(tx));
    if (plan.total < amount) return fail(tx, FailureReason::insufficient_flow);
    add_paths(tx, std::move(plan));
  }

  // Locks turn into transfers in reverse hop order, one hop delay each.
  void begin_settlement(TxId tx) {
    Payment& p = payments_[tx];
    p.status = Status::settlement;
    for (const Route& r : p.routes) {
      if (r.abandoned) continue;
      const std::size_t len = r.locks.size();
      for (std::size_t j = 0; j < len; ++j) {
        push(now_ + cfg_.hop_delay * static_cast<std::int64_t>(len - j), Kind::settle, tx, r.locks[j]);
        ++p.unsettled;
      }
    }
    if (p.unsettled == 0) finish(tx, true, FailureReason::none);
  }

  void on_settle(TxId tx, std::uint32_t lock_index) {
    Payment& p = payments_[tx];
    const Lock l = ledger_.locks(tx)[lock_index];
    ledger_.settle_lock(tx, lock_index);
    if (trees_ && !graph_.channel(l.channel).available(l.direction).positive()) {
      if (rebalance(*trees_, graph_, l.channel) > 0) ++stats_.rebalances;
    }
    if (--p.unsettled == 0) finish(tx, true, FailureReason::none);
  }

  void on_timeout(TxId tx) {
    if (payments_[tx].status == Status::commitment) fail(tx, FailureReason::timeout);
  }

  void fail(TxId tx, FailureReason reason) {
    if (ledger_.has(tx)) ledger_.rollback(tx);
    finish(tx, false, reason);
  }

  void finish(TxId tx, bool success, FailureReason reason) {
    Payment& p = payments_[tx];
    std::size_t locked = 0;
    for (const auto& r : p.routes) locked += r.abandoned ? 0 : r.locks.size();
    ledger_.forget(tx);
    p.status = Status::done;
    p.routes.clear();
    p.routes.shrink_to_fit();
    EpochRecord& rec = records_[tx];
    rec.success = success;
    rec.reason = reason;
    rec.end = now_;
    rec.hops_locked = locked;
    if (hooks_.on_finish) hooks_.on_finish(rec, graph_);
    --active_;
    if (!waiting_.empty()) {
      const TxId next = waiting_.front();
      waiting_.pop_front();
      start(next);
    }
  }

  Graph graph_;
  CollateralLedger ledger_;
  const TransactionSet& txs_;
  Router router_;
  std::optional<TreeSet> trees_;
  const std::optional<ActiveAttack>& attack_;
  EngineConfig cfg_;
  const EngineHooks& hooks_;
  Rng share_rng_;
  Rng grief_rng_;
  MaxFlowWorkspace flow_ws_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  Duration now_{0};
  std::size_t active_ = 0;
  std::deque<TxId> waiting_;
  std::vector<Payment> payments_;
  std::vector<EpochRecord> records_;
  RelayProfile relay_;
  EngineStats stats_;
};

}  // namespace detail

// Runs the whole transaction set through the chosen router under virtual
// time. Bit-identical output for identical inputs.
inline ExperimentResult run_experiment(Graph graph, const TransactionSet& txs, Router router,
                                       std::optional<TreeSet> trees, const std::optional<ActiveAttack>& attack,
                                       const EngineConfig& cfg, const EngineHooks& hooks = {}) {
  detail::Simulation sim(std::move(graph), txs, router, std::move(trees), attack, cfg, hooks);
  return sim.run();
}

}  // namespace pcnsim
