#pragma once

// Consensus for eventually-stable-source networks. Symmetry cannot be broken
// in an anonymous system, so instead of electing a process the automaton
// ranks proposal-value histories by counters: a history that keeps being
// relayed by the stable source gains one per round everywhere, and its
// owners behave identically from then on. Non-leaders propose the bottom
// sentinel but still propose every round, so the current source's value
// always reaches everyone.

#include <optional>
#include <span>

#include "girafsim/automaton.hpp"
#include "girafsim/kernel.hpp"

namespace girafsim {

struct EssState {
  Value val = 0;
  BotSet written, written_old, proposed;
  HistoryRef history = nullptr;
  std::shared_ptr<const CounterMap> counters;  // immutable; rebuilt each round
};

/// Counter update over one round's received messages. Step one takes, for
/// every history appearing in any received map or header, the minimum
/// counter across all received messages (absent reads as zero). Step two
/// bumps each received message's own history to one past the best step-one
/// counter among its prefixes, the history itself included. The local
/// pre-merge map participates only through the self-delivered message.
CounterMap counter_merge(std::span<const EssMessage* const> received);

/// True iff no explicitly tracked history outranks `own`.
bool leader_predicate(const CounterMap& counters, HistoryRef own);

EssState ess_initialize(Value initial, HistoryArena& arena);
EssMessage ess_message_of(const EssState& st);

/// First half of a round transition: fold the received proposal sets into
/// written/proposed and merge the counters. State right after this is what
/// the invariant checkers read.
void ess_merge(EssState& st, std::span<const EssMessage* const> received);

struct EssStepResult {
  std::optional<Value> decision;
  std::optional<EssMessage> message;
};

/// Second half: even-round decide/adopt/propose block, the writtenOld and
/// written shifts, and the history append.
EssStepResult ess_finish(EssState& st, Round k, HistoryArena& arena);

EssStepResult ess_compute(EssState& st, Round k, std::span<const EssMessage* const> received,
                          HistoryArena& arena);

class EssAutomaton : public Automaton {
 public:
  EssAutomaton(Value initial, HistoryArena& arena) : arena_(arena), st_(ess_initialize(initial, arena)) {}

  PayloadPtr initialize(SnapshotSink* snaps) override;
  ComputeOutcome compute(Round k, const Inbox& inbox, SnapshotSink* snaps) override;
  SnapshotPtr snapshot() const override;

  const EssState& state() const { return st_; }

 private:
  HistoryArena& arena_;
  EssState st_;
};

}  // namespace girafsim
