#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "pcnsim/amount.hpp"
#include "pcnsim/error.hpp"
#include "pcnsim/graph.hpp"
#include "pcnsim/workload.hpp"

namespace pcnsim {

struct Lock {
  ChannelId channel;
  Direction direction;
  Amount amount;
  bool open = true;
};

enum class LockResult { ok, insufficient, busy };

// Collateral bookkeeping per payment on top of a live graph. Every lock is
// either settled (turned into a transfer) or released; nothing else touches
// the locked fields.
//
// With channel_slots > 0 a channel holds open locks of at most that many
// distinct payments at once; further payments see it as busy.
class CollateralLedger {
 public:
  explicit CollateralLedger(Graph& g, std::size_t channel_slots = 0)
      : g_(g), slots_(channel_slots), holders_(channel_slots > 0 ? g.channel_count() : 0, 0) {}

  LockResult lock(ChannelId id, Direction d, Amount amount, TxId tx) {
    if (!amount.positive()) throw InvalidParameters("lock amount must be positive");
    Channel& c = g_.channel(id);
    if (!admits(id, tx)) return LockResult::busy;
    if (c.available(d) < amount) return LockResult::insufficient;
    c.lock(d, amount);
    locks_[tx].push_back(Lock{id, d, amount, true});
    if (slots_ > 0 && held_[tx][id]++ == 0) ++holders_[id];
    return LockResult::ok;
  }

  // Whether tx may place a lock on the channel under the slot limit.
  bool admits(ChannelId id, TxId tx) const {
    if (slots_ == 0 || holders_[id] < slots_) return true;
    auto it = held_.find(tx);
    return it != held_.end() && it->second.contains(id);
  }

  std::size_t holders(ChannelId id) const { return slots_ > 0 ? holders_[id] : 0; }

  bool has(TxId tx) const { return locks_.contains(tx); }

  std::span<const Lock> locks(TxId tx) const {
    auto it = locks_.find(tx);
    if (it == locks_.end()) return {};
    return it->second;
  }

  void settle_lock(TxId tx, std::size_t i) {
    Lock& l = entry(tx, i);
    g_.channel(l.channel).settle(l.direction, l.amount);
    l.open = false;
    close_slot(tx, l.channel);
  }

  void release_lock(TxId tx, std::size_t i) {
    Lock& l = entry(tx, i);
    g_.channel(l.channel).release(l.direction, l.amount);
    l.open = false;
    close_slot(tx, l.channel);
  }

  // Settles every open lock of tx and forgets it.
  void settle(TxId tx) {
    auto& list = known(tx);
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i].open) settle_lock(tx, i);
    locks_.erase(tx);
    held_.erase(tx);
  }

  // Releases every open lock of tx and forgets it.
  void rollback(TxId tx) {
    auto& list = known(tx);
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i].open) release_lock(tx, i);
    locks_.erase(tx);
    held_.erase(tx);
  }

  void forget(TxId tx) {
    auto it = locks_.find(tx);
    if (it == locks_.end()) return;
    for (const auto& l : it->second) PCNSIM_ENSURE(!l.open, "forgetting payment with open locks");
    locks_.erase(it);
    held_.erase(tx);
  }

  std::size_t open_payments() const noexcept { return locks_.size(); }

 private:
  void close_slot(TxId tx, ChannelId id) {
    if (slots_ == 0) return;
    auto& mine = held_[tx];
    auto it = mine.find(id);
    PCNSIM_ENSURE(it != mine.end() && it->second > 0, "slot bookkeeping out of sync");
    if (--it->second == 0) {
      mine.erase(it);
      --holders_[id];
    }
  }

  std::vector<Lock>& known(TxId tx) {
    auto it = locks_.find(tx);
    if (it == locks_.end()) throw InvalidParameters("unknown txid " + std::to_string(tx));
    return it->second;
  }

  Lock& entry(TxId tx, std::size_t i) {
    auto& list = known(tx);
    PCNSIM_ENSURE(i < list.size() && list[i].open, "lock already closed");
    return list[i];
  }

  Graph& g_;
  std::size_t slots_;
  std::vector<std::uint32_t> holders_;
  std::unordered_map<TxId, std::vector<Lock>> locks_;
  std::unordered_map<TxId, std::unordered_map<ChannelId, std::uint32_t>> held_;
};

}  // namespace pcnsim
