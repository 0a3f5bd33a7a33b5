#pragma once

// Environment drivers. Lockstep advances every active process once per tick
// and delivers per the schedule; the skewed driver interleaves end-of-round
// events under a seeded fair scheduler while still honoring every timely
// link, since rounds are not synchronized between processes. Both produce
// the same trace schema.

#include <memory>
#include <optional>
#include <vector>

#include "girafsim/kernel.hpp"
#include "girafsim/schedule.hpp"
#include "girafsim/trace.hpp"

namespace girafsim {

struct SimOptions {
  Mode mode = Mode::Lockstep;
  std::uint64_t seed = 0;          // drives the skewed interleaver
  bool record_snapshots = true;
  bool record_end_snapshots = true;
  bool stop_when_quiet = true;     // stop once every process halted or crashed
  std::uint32_t skew_cap = 2;      // max rounds a process may run ahead of the slowest
};

class SimEngine;

/// Hook for application-level activity between kernel steps (weak-set
/// workloads drive add/get through this).
class SimHook {
 public:
  virtual ~SimHook() = default;
  virtual void before_end_of_round([[maybe_unused]] Label p, [[maybe_unused]] Round next_round, [[maybe_unused]] SimEngine& sim) {}
  virtual void after_end_of_round([[maybe_unused]] Label p, [[maybe_unused]] SimEngine& sim) {}
};

/// Aborted run due to an automaton exception; carries the trace prefix.
class SimAbort : public std::runtime_error {
 public:
  SimAbort(const std::string& what, Trace prefix) : std::runtime_error(what), trace_prefix(std::move(prefix)) {}
  Trace trace_prefix;
};

class SimEngine {
 public:
  SimEngine(LinkOracle& links, const AutomatonFactory& factory, TraceRecorder& recorder,
            const SimOptions& opts);

  /// One lockstep tick: crashes, hook ops, end-of-round phase, delivery
  /// phase. Returns false once the horizon is reached or nothing is active.
  bool lockstep_tick(SimHook* hook = nullptr);

  /// Full skewed run (steps until horizon/quiet), excluding the drain.
  void run_skewed(SimHook* hook = nullptr);

  /// Deliver everything still in flight to non-crashed processes.
  void drain();

  /// Crash a process now (between steps). Used by layers whose crash timing
  /// is only known at run time.
  void force_crash(Label p);

  Process& process(Label p) { return *procs_[p]; }
  const Process& process(Label p) const { return *procs_[p]; }
  std::uint32_t process_count() const { return n_; }
  TraceRecorder& recorder() { return rec_; }
  Round current_tick() const { return tick_; }
  bool any_active() const;

 private:
  struct PendingDelivery {
    Tick due_tick = 0;        // lockstep
    Round due_round = 0;      // skewed: recipient round after which it lands
    std::uint64_t seq = 0;
    Label to = 0;
    Label from = 0;
    BroadcastBundle bundle;
  };

  void apply_scheduled_crashes_lockstep();
  void apply_scheduled_crashes_skewed();
  bool ready_skewed(Label p);
  void execute_step(Label p, SimHook* hook, bool inline_hooks);
  void dispatch(Label from, const BroadcastBundle& bundle);
  void deliver_due_lockstep();
  void flush_due_skewed(Label p);
  std::vector<bool> alive_mask() const;

  LinkOracle& links_;
  TraceRecorder& rec_;
  SimOptions opts_;
  std::uint32_t n_;
  Round tick_ = 0;  // lockstep round counter
  std::uint64_t seq_ = 0;
  Rng rng_;
  std::vector<std::unique_ptr<Process>> procs_;
  std::vector<PendingDelivery> pending_;
};

/// Runs a full simulation of `factory` automatons under `sched` and returns
/// the trace. Throws SimAbort if an automaton throws.
Trace run_simulation(const Schedule& sched, const AutomatonFactory& factory, const SimOptions& opts,
                     SimHook* hook = nullptr, TraceMeta meta = {});

TraceMeta meta_for(const Schedule& sched, AlgoKind algo, Mode mode, const std::vector<Value>& values);

}  // namespace girafsim
