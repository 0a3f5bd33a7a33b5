#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "girafsim/checkers.hpp"
#include "girafsim/emulation.hpp"
#include "girafsim/scenario.hpp"

using namespace girafsim;

namespace {

AutomatonFactory relay_factory() {
  return [](std::size_t i) -> std::unique_ptr<Automaton> {
    return std::make_unique<RelayAutomaton>(static_cast<Value>(i));
  };
}

}  // namespace

TEST_CASE("a lone emulated process keeps advancing rounds") {
  OracleBackend backend(1, 7);
  EmulationOptions opts;
  opts.n = 1;
  opts.seed = 7;
  opts.round_target = 6;
  Trace t = run_emulation(backend, relay_factory(), opts);

  Round reached = 0;
  for (const TraceEvent& e : t.events) {
    if (e.kind == TraceEventKind::EndOfRound) reached = std::max(reached, e.round);
  }
  CHECK(reached == 6);
  CHECK_FALSE(validate_trace_env(t, EnvKind::MS).has_value());
}

TEST_CASE("booting enqueues one add per process") {
  struct CountingBackend : WeakSetBackend {
    std::uint32_t adds = 0;
    void add(Label, const WsItem&) override { ++adds; }
    bool add_pending(Label) const override { return true; }
    bool take_add_completion(Label) override { return false; }
    std::vector<WsItem> get(Label) override { return {}; }
    void step() override {}
    void crash(Label) override {}
  } backend;

  EmulationOptions opts;
  opts.n = 3;
  opts.round_target = 1;
  opts.step_budget = 1;
  run_emulation(backend, relay_factory(), opts);
  CHECK(backend.adds == 3);
}

TEST_CASE("already-delivered items are not re-received") {
  OracleBackend backend(2, 3);
  EmulationOptions opts;
  opts.n = 2;
  opts.seed = 3;
  opts.round_target = 8;
  Trace t = run_emulation(backend, relay_factory(), opts);

  // per recipient, (round, digest) pairs never repeat
  std::set<std::tuple<Label, Round, std::uint64_t>> seen;
  for (const TraceEvent& e : t.events) {
    if (e.kind != TraceEventKind::Deliver) continue;
    auto key = std::make_tuple(e.proc, e.round, e.digest);
    CHECK_FALSE(seen.count(key));
    seen.insert(key);
  }
}

TEST_CASE("emulated traces satisfy the moving-source definition: reference backend") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    OracleBackend backend(3, seed);
    EmulationOptions opts;
    opts.n = 3;
    opts.seed = seed;
    opts.round_target = 9;
    if (seed % 3 == 0) opts.crashes = {std::nullopt, static_cast<Round>(1 + seed % 7), std::nullopt};
    Trace t = run_emulation(backend, relay_factory(), opts);
    INFO("seed ", seed);
    CHECK_FALSE(validate_trace_env(t, EnvKind::MS).has_value());
    CHECK_FALSE(check_progress(t, opts.round_target).has_value());
  }
}

TEST_CASE("emulated traces satisfy the moving-source definition: network backend") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Scenario sc;
    sc.algo = AlgoKind::Emulation;
    sc.backend = BackendKind::Network;
    sc.wrap = WrapKind::Relay;
    sc.n = 1 + static_cast<std::uint32_t>(seed % 3);
    sc.values.assign(sc.n, 0);
    for (std::uint32_t i = 0; i < sc.n; ++i) sc.values[i] = seed + i;
    sc.seed = seed;
    sc.round_target = 8;
    if (seed % 4 == 0 && sc.n > 1) {
      sc.crashes.assign(sc.n, std::nullopt);
      sc.crashes[0] = static_cast<Round>(1 + seed % 5);
    }
    RunResult run = run_scenario(sc);
    INFO("seed ", seed, "\n", run.report.to_text());
    CHECK(run.report.all_ok());
  }
}

TEST_CASE("consensus over the emulated environment stays safe and can decide") {
  std::uint32_t decided_runs = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Scenario sc;
    sc.algo = AlgoKind::Emulation;
    sc.backend = seed % 2 ? BackendKind::Oracle : BackendKind::Network;
    sc.wrap = WrapKind::Consensus;
    sc.n = 2 + static_cast<std::uint32_t>(seed % 2);
    sc.values.clear();
    for (std::uint32_t i = 0; i < sc.n; ++i) sc.values.push_back((seed * 3 + i) % 8);
    sc.seed = seed;
    sc.round_target = 12;
    RunResult run = run_scenario(sc);
    INFO("seed ", seed, "\n", run.report.to_text());
    CHECK(run.report.all_ok());
    if (!run.report.decisions.empty()) ++decided_runs;
  }
  CHECK(decided_runs > 0);  // safety always, and the stack is live enough to finish sometimes
}

TEST_CASE("double boot is rejected") {
  // run_emulation boots internally; booting again through a second run over
  // the same processes is not expressible, so exercise the guard directly
  OracleBackend backend(1, 1);
  EmulationOptions opts;
  opts.n = 1;
  opts.round_target = 2;
  Trace t = run_emulation(backend, relay_factory(), opts);
  CHECK(!t.events.empty());

  // the kernel-level equivalent: re-initializing a process that already ran
  TraceMeta meta;
  meta.n = 1;
  TraceRecorder rec(meta);
  Process p(0, std::make_unique<RelayAutomaton>(0));
  p.end_of_round(rec);
  p.crash();
  CHECK_THROWS_AS(p.end_of_round(rec), HarnessBug);
}

TEST_CASE("the reference backend itself honors interval semantics") {
  // drive it directly and log the ops
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    OracleWeakSet ws(2, seed);
    Rng rng(seed * 31);
    std::vector<WsOpRecord> log;
    Tick now = 0;
    std::vector<std::optional<std::size_t>> open(2);

    for (int step = 0; step < 60; ++step) {
      ws.step();
      ++now;
      for (Label p = 0; p < 2; ++p) {
        if (open[p] && ws.take_add_completion(p)) {
          log[*open[p]].end = now;
          log[*open[p]].completed = true;
          open[p].reset();
        }
        if (!open[p] && rng.chance(1, 3)) {
          WsOpRecord op;
          op.kind = WsOpRecord::Kind::Add;
          op.proc = p;
          op.start = now;
          op.item = ws_item_of_value(rng.below(9));
          open[p] = log.size();
          log.push_back(op);
          ws.add(p, op.item);
        }
        if (rng.chance(1, 4)) {
          WsOpRecord op;
          op.kind = WsOpRecord::Kind::Get;
          op.proc = p;
          op.start = op.end = now;
          op.completed = true;
          op.result = ws.get(p);
          log.push_back(op);
        }
      }
    }
    INFO("seed ", seed);
    CHECK_FALSE(oracle_check(log).has_value());
  }
}
