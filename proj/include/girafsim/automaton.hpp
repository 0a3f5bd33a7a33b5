#pragma once

// The two-function automaton contract the round kernel drives. Automata are
// deterministic and non-blocking; they see only the round number and the
// per-round message sets, never a process label or the network size.

#include <memory>
#include <optional>
#include <variant>

#include "girafsim/payload.hpp"

namespace girafsim {

class Inbox;

/// Where in a compute step a state snapshot was taken. Mid is right after the
/// received sets and counters have been folded in, before the even-round
/// block; End is at return. Invariant checkers read Mid.
enum class SnapPoint : std::uint8_t { Mid, End };

struct EsSnapshot {
  Value val = 0;
  ValueSet written, written_old, proposed;
};

struct EssSnapshot {
  Value val = 0;
  BotSet written, written_old, proposed;
  HistoryRef history = nullptr;
  std::shared_ptr<const CounterMap> counters;
};

struct WsSnapshot {
  std::optional<std::string> val;
  WsSet proposed, written;
  bool block = false;
};

using Snapshot = std::variant<EsSnapshot, EssSnapshot, WsSnapshot>;
using SnapshotPtr = std::shared_ptr<const Snapshot>;

std::string encode_snapshot(const Snapshot& s);
SnapshotPtr decode_snapshot(const std::string& bytes, HistoryArena& arena);

class SnapshotSink {
 public:
  virtual ~SnapshotSink() = default;
  virtual void on_snapshot(SnapPoint point, SnapshotPtr snap) = 0;
};

struct ComputeOutcome {
  PayloadPtr message;             // null iff decided
  std::optional<Value> decision;  // set iff the automaton decided and halts
};

class Automaton {
 public:
  virtual ~Automaton() = default;

  /// First step; produces the round-1 message.
  virtual PayloadPtr initialize(SnapshotSink* snaps) = 0;

  /// One round transition. `inbox` is the full per-round message history;
  /// round k's set is guaranteed non-empty (self-delivery).
  virtual ComputeOutcome compute(Round k, const Inbox& inbox, SnapshotSink* snaps) = 0;

  /// Read-only copy of the current automaton variables.
  virtual SnapshotPtr snapshot() const = 0;
};

using AutomatonFactory = std::function<std::unique_ptr<Automaton>(std::size_t index)>;

}  // namespace girafsim
