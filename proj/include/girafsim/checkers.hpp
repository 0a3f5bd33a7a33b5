#pragma once

// Property checkers over traces: consensus safety, the written/proposed
// containment invariants behind the agreement proofs, realized environment
// validation, fairness, reliability, counter-growth and leader-window checks
// for the stable-source automaton, and the weak-set interval contract.
// Every violation names the earliest offending round and a witness.

#include <optional>
#include <string>
#include <vector>

#include "girafsim/trace.hpp"
#include "girafsim/weakset.hpp"

namespace girafsim {

struct PropertyResult {
  std::string name;
  bool applicable = true;
  bool ok = true;
  std::string detail;  // witness description on failure, notes otherwise
};

struct CheckReport {
  std::vector<PropertyResult> results;
  std::vector<std::pair<Label, std::pair<Round, Value>>> decisions;  // (proc, (round, value))

  bool all_ok() const {
    for (const auto& r : results) {
      if (r.applicable && !r.ok) return false;
    }
    return true;
  }
  void add(PropertyResult r) { results.push_back(std::move(r)); }
  std::string to_text() const;
};

struct TraceViolation {
  Round round = 0;
  std::string detail;
};

using CheckOutcome = std::optional<TraceViolation>;

// --- consensus properties ---------------------------------------------------

/// Every decided value is one of the run's initial values; bottom is never
/// decidable by construction of the decide events.
CheckOutcome check_validity(const Trace& t);

/// No two decide events carry different values; at most one decide per
/// process.
CheckOutcome check_agreement(const Trace& t);

/// Every correct process decides by `bound`.
CheckOutcome check_termination(const Trace& t, Round bound);

// --- proof-invariant checkers ------------------------------------------------

/// If nobody has decided before round k, a value seen in some process's
/// written set at round k appears in every round-k proposed set: the value
/// was relayed by that round's source. Checked on mid snapshots, for all
/// algorithms that expose written/proposed.
CheckOutcome check_written_in_all_proposed(const Trace& t);

/// Even-round refinement: a value in writtenOld at round k is in written at
/// every process computing round k.
CheckOutcome check_written_old_in_all_written(const Trace& t);

/// Decided processes close with converged proposals: the deciding process's
/// last two mid snapshots hold subsets of {decided value, bottom}.
CheckOutcome check_decision_window_converged(const Trace& t);

/// Automaton state sanity: val stays within the initial values (and off
/// bottom) at every snapshot; history length tracks the round; counters stay
/// bounded by round + 1.
CheckOutcome check_state_sanity(const Trace& t);

// --- realized environment validation -----------------------------------------

struct EnvParams {
  Round kstab = 0;
  std::optional<Label> stable_source;
  /// Check rounds up to this one only (inclusive); 0 means the whole trace.
  Round upto = 0;
};

/// Ground-truth environment check on delivery order as realized in the
/// trace: per round, some participant's message reached every correct
/// process that finished the round before it read its round set. This is
/// what emulated environments are judged by, where no schedule exists.
CheckOutcome validate_trace_env(const Trace& t, EnvKind env, const EnvParams& params = {});

/// Every correct, never-halting process keeps taking steps: at most
/// `max_gap` end-of-round events by others separate its consecutive steps.
CheckOutcome check_fairness(const Trace& t, std::uint32_t max_gap);

/// Reliable broadcast: every round message produced by any process reaches
/// every correct process by the end of the trace.
CheckOutcome check_reliability(const Trace& t);

// --- stable-source window checks ----------------------------------------------

struct EssWindowParams {
  Label source = 0;
  Round kstab = 1;
};

/// Windowed forms of the counter-growth and leader-stability arguments: over
/// the last quarter of the stabilized pre-decision window, the counter of
/// the source's history gains exactly one per round at every process the
/// source keeps hearing from, and the leader set is non-empty, constant and
/// timely toward that whole group.
CheckOutcome check_counter_growth(const Trace& t, const EssWindowParams& params);
CheckOutcome check_leader_window(const Trace& t, const EssWindowParams& params);

/// Whether the run stabilized long enough before deciding for the windowed
/// checks to say anything.
bool ess_window_usable(const Trace& t, Round kstab);

// --- weak-set properties -------------------------------------------------------

/// Interval contract on the add/get records embedded in the trace.
CheckOutcome check_ws_intervals(const Trace& t);

/// Every add started by a process that never crashes completes.
CheckOutcome check_ws_liveness(const Trace& t);

// --- emulation -----------------------------------------------------------------

/// Every process that never crashed nor decided reached at least
/// `min_rounds` rounds.
CheckOutcome check_progress(const Trace& t, Round min_rounds);

}  // namespace girafsim
