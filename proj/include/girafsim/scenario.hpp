#pragma once

// Scenario configuration, the single-run composer (simulate + check), the
// seeded fuzz driver, and trace re-checking. This is the engine room behind
// the command-line front end.

#include <optional>
#include <string>
#include <vector>

#include "girafsim/checkers.hpp"
#include "girafsim/emulation.hpp"
#include "girafsim/schedule.hpp"
#include "girafsim/sim.hpp"

namespace girafsim {

enum class BackendKind : std::uint8_t { Oracle, Network };
enum class WrapKind : std::uint8_t { Relay, Consensus };

struct Scenario {
  AlgoKind algo = AlgoKind::ES;
  EnvKind env = EnvKind::MS;
  Mode mode = Mode::Lockstep;
  std::uint32_t n = 1;
  std::vector<Value> values;  // one initial value per process
  std::optional<Round> kstab;
  std::optional<Label> stable_source;
  Round horizon = 30;
  std::uint64_t seed = 1;
  std::uint32_t dmax = 5;
  std::uint32_t crash_budget = 0;
  std::vector<std::optional<Round>> crashes;  // explicit placement; empty = budgeted
  SourcePolicy policy = SourcePolicy::Rotate;
  bool ws_workload = true;            // weak-set runs: auto-generate add/get ops
  BackendKind backend = BackendKind::Oracle;  // emulation runs
  WrapKind wrap = WrapKind::Consensus;        // emulation runs
  Round round_target = 10;                    // emulation runs
  std::string out;  // trace output path ("" = none)
};

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

struct RunResult {
  Trace trace;
  CheckReport report;
};

/// Executes one seeded run and every check that applies to the scenario.
RunResult run_scenario(const Scenario& sc);

struct RegRunResult {
  Trace trace;
  std::vector<RegOpRecord> log;
  CheckReport report;
};

/// Runs a seeded register workload through the weak-set stack: writes attach
/// snapshot sizes, reads apply the maximal-history rule, and the regularity
/// envelope plus the underlying interval contract are both checked.
RegRunResult run_register_scenario(const Scenario& sc);

/// Replays a stored trace through the selected checkers ("all" = everything
/// applicable given the trace meta).
CheckReport check_trace(const Trace& t, const std::vector<std::string>& properties = {});

/// Never-deciding automaton that floods everything it has seen; used to
/// exercise environments and the emulation without consensus in the way.
class RelayAutomaton : public Automaton {
 public:
  explicit RelayAutomaton(Value initial) { seen_.insert(initial); }
  PayloadPtr initialize(SnapshotSink*) override { return make_payload(seen_); }
  ComputeOutcome compute(Round k, const Inbox& inbox, SnapshotSink*) override {
    for (const PayloadPtr& p : inbox.round(k)) seen_.merge(p->value_set());
    ComputeOutcome out;
    out.message = make_payload(seen_);
    return out;
  }
  SnapshotPtr snapshot() const override {
    EsSnapshot s;
    s.proposed = seen_;
    s.val = seen_.empty() ? 0 : seen_.max();
    return std::make_shared<const Snapshot>(Snapshot(std::move(s)));
  }

 private:
  ValueSet seen_;
};

// --- fuzzing -----------------------------------------------------------------

struct FuzzSpec {
  AlgoKind algo = AlgoKind::ES;
  EnvKind env = EnvKind::MS;
  std::uint32_t n_min = 1, n_max = 6;
  Round kstab_max = 20;
  std::uint64_t runs = 100;
  bool lockstep_only = false;  // otherwise alternate lockstep/skewed
  bool both_backends = true;   // emulation: alternate oracle/network
  Round termination_bound_slack = 8;  // ES: decide by kstab + slack
};

struct FuzzSummary {
  std::uint64_t runs = 0;
  std::uint64_t failures = 0;
  std::uint64_t decided_runs = 0;
  std::uint64_t window_checked_runs = 0;  // ESS: runs where the windowed checks applied
  Round max_decide_round = 0;
  std::vector<std::string> failure_notes;  // first few, with reproduction seeds

  bool ok() const { return failures == 0; }
  std::string to_text() const;
};

/// Deterministic parallel fuzz: run i uses seed mix(seed, i); the summary is
/// aggregated in index order regardless of worker interleaving.
FuzzSummary fuzz(const FuzzSpec& spec, std::uint64_t seed, unsigned jobs = 0);

// Pinned demonstration scenarios (hand-derived decisions; byte-pinned traces
// in the test suite).
Scenario demo_es_single();        // one process, value 5: decides 5 at round 4
Scenario demo_es_pair();          // two processes, values {3,7}, synchronous: both decide 7 at round 6
Scenario demo_ess_single();       // one process, value 9: decides 9 at round 4

}  // namespace girafsim
