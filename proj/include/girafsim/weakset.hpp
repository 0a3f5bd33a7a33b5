#pragma once

// The weak-set shared object: add/get over an anonymous network. Gets return
// every value whose add completed before the get began and never a value
// whose add had not started; concurrent adds may go either way. Items are
// opaque canonical byte strings so plain values, register entries and
// emulated round bundles all fit the same object.

#include <optional>
#include <string>
#include <vector>

#include "girafsim/automaton.hpp"
#include "girafsim/kernel.hpp"
#include "girafsim/trace.hpp"

namespace girafsim {

using WsItem = std::string;

WsItem ws_item_of_value(Value v);
Value ws_item_value(const WsItem& item);

/// Register entry: a value tagged with the size of the weak-set snapshot
/// taken when the write began.
WsItem ws_item_of_register_entry(Value v, std::uint64_t history_len);
std::pair<Value, std::uint64_t> ws_register_entry(const WsItem& item);
bool ws_item_is_register_entry(const WsItem& item);

/// Network implementation of a weak-set for moving-source environments.
/// add() publishes the value and blocks the caller until the value shows up
/// in some round's intersection; the automaton itself never blocks — the
/// wait is a harness-level completion event polled at each compute. get()
/// returns the current proposed set instantly.
class WsAutomaton : public Automaton {
 public:
  WsAutomaton() = default;

  PayloadPtr initialize(SnapshotSink* snaps) override;
  ComputeOutcome compute(Round k, const Inbox& inbox, SnapshotSink* snaps) override;
  SnapshotPtr snapshot() const override;

  /// Starts an add. At most one add may be pending per process; overlapping
  /// adds are a harness bug and throw.
  void add(const WsItem& item);
  bool add_pending() const { return block_; }
  /// Consumes the completion edge of the last add, if it completed since the
  /// previous call.
  bool take_add_completion();

  const WsSet& get() const { return proposed_; }

 private:
  std::optional<WsItem> val_;
  WsSet proposed_, written_;
  bool block_ = false;
  bool completion_edge_ = false;
  std::size_t union_cursor_ = 0;                            // into the inbox insertion log
  std::vector<std::pair<Round, PayloadPtr>> deferred_;      // early arrivals beyond the current round
};

// ---------------------------------------------------------------------------
// Interval-semantics checking

struct WsOpRecord {
  enum class Kind : std::uint8_t { Add, Get } kind = Kind::Add;
  Label proc = 0;
  Tick start = 0;
  Tick end = 0;   // adds: completion tick; meaningful only when completed
  bool completed = false;
  WsItem item;                  // adds
  std::vector<WsItem> result;   // gets
  OpTag tag = OpTag::Plain;
};

struct WsViolation {
  std::size_t op_index = 0;
  std::string reason;
};

/// Checks a real-time-ordered operation log against the weak-set contract:
/// every completed get returns all items whose add completed strictly before
/// the get began, and nothing whose add had not started strictly before the
/// get ended.
std::optional<WsViolation> oracle_check(const std::vector<WsOpRecord>& log);

/// Extracts the operation log embedded in a trace's add/get records.
std::vector<WsOpRecord> ws_ops_from_trace(const Trace& t);

/// Linearizable in-memory weak-set used as a reference backend. Adds become
/// visible and then complete after seeded delays measured in step() calls,
/// which lets an adversary stretch operation intervals while interval
/// semantics hold by construction.
class OracleWeakSet {
 public:
  OracleWeakSet(std::uint32_t n, std::uint64_t seed, std::uint32_t max_delay = 3);

  void add(Label p, const WsItem& item);
  bool add_pending(Label p) const;
  bool take_add_completion(Label p);
  std::vector<WsItem> get(Label p) const;
  void step();
  void crash(Label p);

 private:
  struct PendingAdd {
    WsItem item;
    std::uint64_t visible_at = 0;
    std::uint64_t complete_at = 0;
  };

  std::uint32_t n_;
  std::uint32_t max_delay_;
  Rng rng_;
  std::uint64_t now_ = 0;
  WsSet visible_;
  std::vector<std::optional<PendingAdd>> pending_;
  std::vector<bool> completion_edge_;
  std::vector<bool> crashed_;
};

// ---------------------------------------------------------------------------
// Regular register on top of any weak-set (adapter-level read rule)

/// Among the register entries in a weak-set snapshot, picks the highest
/// value carried by a maximal-length history tag. Empty result when the
/// snapshot holds no register entry.
std::optional<Value> register_read_rule(const std::vector<WsItem>& snapshot);

struct RegOpRecord {
  enum class Kind : std::uint8_t { Write, Read } kind = Kind::Write;
  Label proc = 0;
  Tick start = 0;
  Tick end = 0;
  bool completed = false;
  Value value = 0;                   // writes: written value; reads: returned value
  std::uint64_t history_len = 0;     // writes: attached snapshot size
  bool read_empty = false;           // reads: distinguished empty result
};

struct RegViolation {
  std::size_t op_index = 0;
  std::string reason;
};

/// Regularity envelope: a read must return the value of some write whose
/// history length is maximal among the writes completed before the read
/// began, or the value of a write concurrent with the read. Empty is legal
/// only while no write has completed.
std::optional<RegViolation> register_check(const std::vector<RegOpRecord>& log);

}  // namespace girafsim
