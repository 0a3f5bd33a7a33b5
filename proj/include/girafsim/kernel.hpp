#pragma once

// Round kernel: per-process message sets, self-delivery and the
// end-of-round / receive transitions. One Process is one automaton plus its
// bookkeeping; all networking lives in the environment driver.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "girafsim/automaton.hpp"
#include "girafsim/payload.hpp"

namespace girafsim {

/// Per-round sets of distinct message payloads. Insertion is idempotent;
/// duplicates of structurally equal payloads collapse. Late insertions into
/// past rounds are allowed (they are only ever re-read by automata that scan
/// all rounds).
class Inbox {
 public:
  /// Returns true iff the payload was not already present at that round.
  bool insert(Round k, const PayloadPtr& p);

  std::span<const PayloadPtr> round(Round k) const;
  Round max_round() const { return by_round_.empty() ? 0 : static_cast<Round>(by_round_.size() - 1); }

  /// Monotone log of (round, payload) insertions, enabling incremental
  /// all-round unions without rescanning.
  const std::vector<std::pair<Round, PayloadPtr>>& insertion_log() const { return log_; }

 private:
  std::vector<std::vector<PayloadPtr>> by_round_;  // index 0 unused
  std::vector<std::pair<Round, PayloadPtr>> log_;
};

struct BroadcastBundle {
  std::vector<PayloadPtr> payloads;  // snapshot of the sender's set at `round`
  Round round = 0;
};

/// Receives kernel-level events from a Process. The driver supplies one and
/// turns these into trace records.
class KernelEventSink {
 public:
  virtual ~KernelEventSink() = default;
  virtual void on_end_of_round(Label p, Round entered, std::uint64_t payload_digest) = 0;
  virtual void on_deliver(Label p, Round k, Label from, Round at_round, std::uint64_t digest) = 0;
  virtual void on_decide(Label p, Round k, Value v) = 0;
  virtual void on_snapshot(Label p, Round k, SnapPoint point, SnapshotPtr snap) = 0;
};

class Process {
 public:
  Process(Label label, std::unique_ptr<Automaton> automaton)
      : label_(label), automaton_(std::move(automaton)) {}

  /// Executes one end-of-round input: initialize() on the first invocation,
  /// compute(k, M) afterwards. The produced payload is self-inserted at the
  /// next round index and the full set at that index is returned for
  /// broadcast. Returns nullopt when the automaton decided (the process
  /// halts and sends nothing). Must not be invoked on a crashed or halted
  /// process: that is a harness bug and throws.
  std::optional<BroadcastBundle> end_of_round(KernelEventSink& sink);

  /// Deliver a bundle into the per-round set. Deliverable at any time, any
  /// round index; no effect on crashed processes.
  void receive(const BroadcastBundle& bundle, Label from, KernelEventSink& sink);

  void crash() { crashed_ = true; }

  Label label() const { return label_; }
  Round round() const { return round_; }
  bool halted() const { return halted_; }
  bool crashed() const { return crashed_; }
  bool active() const { return !halted_ && !crashed_; }
  const Inbox& inbox() const { return inbox_; }
  std::optional<Value> decision() const { return decision_; }

  SnapshotPtr snapshot() const { return automaton_->snapshot(); }
  Automaton& automaton() { return *automaton_; }

 private:
  Label label_;
  Round round_ = 0;  // number of end-of-round invocations executed
  bool halted_ = false;
  bool crashed_ = false;
  std::optional<Value> decision_;
  Inbox inbox_;
  std::unique_ptr<Automaton> automaton_;
};

}  // namespace girafsim
