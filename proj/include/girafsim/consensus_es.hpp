#pragma once

// Consensus for eventually-synchronous networks. A value is only adopted
// once it was contained in every message received in a round, i.e. it was
// relayed by that round's source and is therefore known everywhere.

#include <optional>
#include <span>

#include "girafsim/automaton.hpp"
#include "girafsim/kernel.hpp"

namespace girafsim {

struct EsState {
  Value val = 0;
  ValueSet written, written_old, proposed;
};

/// State after the init step; the first message is the (empty) proposed set.
EsState es_initialize(Value initial);

/// First half of a round transition: written becomes the intersection of the
/// received sets, proposed absorbs their union. Invariant checkers read the
/// state exactly at this point.
void es_merge(EsState& st, std::span<const ValueSet* const> received);

struct EsStepResult {
  std::optional<Value> decision;
  ValueSet message;  // empty when decided
};

/// Second half: even-round decide/adopt block and the writtenOld shift.
EsStepResult es_finish(EsState& st, Round k);

/// Full transition. `received` must be non-empty (self-delivery guarantees
/// at least one element).
EsStepResult es_compute(EsState& st, Round k, std::span<const ValueSet* const> received);

class EsAutomaton : public Automaton {
 public:
  explicit EsAutomaton(Value initial) : st_(es_initialize(initial)) {}

  PayloadPtr initialize(SnapshotSink* snaps) override;
  ComputeOutcome compute(Round k, const Inbox& inbox, SnapshotSink* snaps) override;
  SnapshotPtr snapshot() const override;

  const EsState& state() const { return st_; }

 private:
  EsState st_;
};

}  // namespace girafsim
