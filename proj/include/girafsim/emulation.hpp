#pragma once

// Emulating a moving-source environment for an arbitrary round automaton out
// of nothing but a shared weak-set: each process adds its outgoing round
// bundle to the set, waits for the add to complete, drains the set into
// receive events and only then ends its round. The first add to complete in
// a round is everyone's source for that round.

#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "girafsim/schedule.hpp"
#include "girafsim/sim.hpp"
#include "girafsim/trace.hpp"
#include "girafsim/weakset.hpp"

namespace girafsim {

/// Backend contract: an asynchronous weak-set shared by the emulated
/// processes. step() advances backend time; adds complete at some later
/// step, observed via the completion edge.
class WeakSetBackend {
 public:
  virtual ~WeakSetBackend() = default;
  virtual void add(Label p, const WsItem& item) = 0;
  virtual bool add_pending(Label p) const = 0;
  virtual bool take_add_completion(Label p) = 0;
  virtual std::vector<WsItem> get(Label p) = 0;
  virtual void step() = 0;
  virtual void crash(Label p) = 0;
};

/// Linearizable reference backend with seeded adversarial completion delays.
class OracleBackend : public WeakSetBackend {
 public:
  OracleBackend(std::uint32_t n, std::uint64_t seed) : ws_(n, seed) {}
  void add(Label p, const WsItem& item) override { ws_.add(p, item); }
  bool add_pending(Label p) const override { return ws_.add_pending(p); }
  bool take_add_completion(Label p) override { return ws_.take_add_completion(p); }
  std::vector<WsItem> get(Label p) override { return ws_.get(p); }
  void step() override { ws_.step(); }
  void crash(Label p) override { ws_.crash(p); }

 private:
  OracleWeakSet ws_;
};

/// Full-stack backend: one weak-set automaton per process, run over an inner
/// moving-source network whose source choices follow the processes still
/// alive. step() advances the inner network by one tick.
class NetworkBackend : public WeakSetBackend {
 public:
  NetworkBackend(std::uint32_t n, std::uint64_t seed, Round inner_horizon);
  ~NetworkBackend() override;

  void add(Label p, const WsItem& item) override;
  bool add_pending(Label p) const override;
  bool take_add_completion(Label p) override;
  std::vector<WsItem> get(Label p) override;
  void step() override;
  void crash(Label p) override;

  /// Inner network trace (for validating the inner environment in tests).
  Trace take_inner_trace();

 private:
  WsAutomaton& automaton(Label p) const;

  IncrementalMsOracle links_;
  TraceRecorder rec_;
  std::unique_ptr<SimEngine> engine_;
  std::vector<bool> completion_edge_;
};

struct EmulationOptions {
  std::uint32_t n = 1;
  std::uint64_t seed = 0;
  Round round_target = 10;          // stop a process once it reaches this round
  std::uint64_t step_budget = 0;    // 0 = derived from the target
  std::vector<std::optional<Round>> crashes;  // by emulated round
  std::vector<Value> values;        // recorded in the trace meta
};

/// Runs the emulation over `backend` and returns the emulated trace
/// (tagged emulated=true). Decided processes stop; crashed processes are
/// removed from both layers.
Trace run_emulation(WeakSetBackend& backend, const AutomatonFactory& factory, const EmulationOptions& opts);

}  // namespace girafsim
