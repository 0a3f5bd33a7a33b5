#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "girafsim/checkers.hpp"
#include "girafsim/scenario.hpp"
#include "girafsim/weakset.hpp"

using namespace girafsim;

namespace {

WsOpRecord add_op(Label p, Tick start, Tick end, Value v, bool completed = true) {
  WsOpRecord op;
  op.kind = WsOpRecord::Kind::Add;
  op.proc = p;
  op.start = start;
  op.end = end;
  op.completed = completed;
  op.item = ws_item_of_value(v);
  return op;
}

WsOpRecord get_op(Label p, Tick at, std::vector<Value> result) {
  WsOpRecord op;
  op.kind = WsOpRecord::Kind::Get;
  op.proc = p;
  op.start = op.end = at;
  op.completed = true;
  for (Value v : result) op.result.push_back(ws_item_of_value(v));
  return op;
}

}  // namespace

TEST_CASE("interval oracle: missing a completed add is a violation") {
  auto v = oracle_check({add_op(0, 0, 2, 1), get_op(1, 3, {})});
  REQUIRE(v.has_value());
  CHECK(v->op_index == 1);
}

TEST_CASE("interval oracle: concurrent adds may or may not be returned") {
  CHECK_FALSE(oracle_check({add_op(0, 0, 5, 1), get_op(1, 2, {1})}).has_value());
  CHECK_FALSE(oracle_check({add_op(0, 0, 5, 1), get_op(1, 2, {})}).has_value());
}

TEST_CASE("interval oracle: a value no add started is phantom") {
  auto v = oracle_check({get_op(0, 1, {9})});
  REQUIRE(v.has_value());
  CHECK(v->op_index == 0);
}

TEST_CASE("a lone add completes after one full exchange") {
  // add during round 1; the value is written once the round-2 set becomes
  // the process's own proposal carrying it, i.e. at the third end-of-round
  Scenario sc;
  sc.algo = AlgoKind::Weakset;
  sc.n = 1;
  sc.horizon = 10;
  sc.seed = 1;
  sc.ws_workload = false;
  Schedule sched = generate_schedule(EnvKind::MS, 1, 10, 0, 1);

  struct OneAdd : SimHook {
    bool issued = false;
    std::optional<Round> completed_at;
    void before_end_of_round(Label, Round next, SimEngine& sim) override {
      auto* ws = dynamic_cast<WsAutomaton*>(&sim.process(0).automaton());
      if (next == 2 && !issued) {  // while in round 1
        ws->add(ws_item_of_value(4));
        issued = true;
      }
    }
    void after_end_of_round(Label, SimEngine& sim) override {
      auto* ws = dynamic_cast<WsAutomaton*>(&sim.process(0).automaton());
      if (ws->take_add_completion()) completed_at = sim.process(0).round();
    }
  } hook;

  SimOptions so;
  so.stop_when_quiet = false;
  run_simulation(sched, [](std::size_t) { return std::make_unique<WsAutomaton>(); }, so, &hook);
  REQUIRE(hook.completed_at.has_value());
  CHECK(*hook.completed_at == 3);
}

TEST_CASE("get before any add returns the empty set") {
  WsAutomaton ws;
  CHECK(ws.get().empty());
}

TEST_CASE("overlapping adds from one process are a harness bug") {
  WsAutomaton ws;
  ws.add(ws_item_of_value(1));
  CHECK_THROWS_AS(ws.add(ws_item_of_value(2)), HarnessBug);
}

TEST_CASE("compute folds in late bundles from every earlier round") {
  TraceMeta meta;
  meta.algo = AlgoKind::Weakset;
  meta.n = 2;
  TraceRecorder rec(meta);
  Process p(0, std::make_unique<WsAutomaton>());

  for (int i = 0; i < 5; ++i) p.end_of_round(rec);
  REQUIRE(p.round() == 5);
  // a round-2 bundle shows up only now
  WsSet late;
  late.insert(ws_item_of_value(77));
  p.receive(BroadcastBundle{{make_payload(late)}, 2}, 1, rec);

  p.end_of_round(rec);  // computes round 5: the all-round union picks it up
  auto* ws = dynamic_cast<WsAutomaton*>(&p.automaton());
  REQUIRE(ws != nullptr);
  CHECK(ws->get().contains(ws_item_of_value(77)));
}

TEST_CASE("written is the per-round intersection") {
  TraceMeta meta;
  meta.algo = AlgoKind::Weakset;
  meta.n = 3;
  TraceRecorder rec(meta);

  WsSet a, b;
  a.insert(ws_item_of_value(1));
  b.insert(ws_item_of_value(2));

  Process p(0, std::make_unique<WsAutomaton>());
  p.end_of_round(rec);
  // two disjoint round-1 payloads next to the own (empty) one
  p.receive(BroadcastBundle{{make_payload(a)}, 1}, 1, rec);
  p.receive(BroadcastBundle{{make_payload(b)}, 1}, 2, rec);
  p.end_of_round(rec);
  SnapshotPtr held = p.snapshot();
  const auto* snap = std::get_if<WsSnapshot>(held.get());
  REQUIRE(snap != nullptr);
  CHECK(snap->written.empty());
}

TEST_CASE("register read rule: longest history wins, then highest value") {
  std::vector<WsItem> entries = {ws_item_of_register_entry(5, 2), ws_item_of_register_entry(9, 1)};
  CHECK(register_read_rule(entries) == Value{5});

  entries = {ws_item_of_register_entry(5, 2), ws_item_of_register_entry(9, 2)};
  CHECK(register_read_rule(entries) == Value{9});

  entries = {ws_item_of_register_entry(7, 0)};
  CHECK(register_read_rule(entries) == Value{7});

  CHECK_FALSE(register_read_rule({}).has_value());
}

TEST_CASE("register regularity checker accepts legal and flags illegal reads") {
  auto write = [](Label p, Tick s, Tick e, Value v, std::uint64_t hlen, bool completed = true) {
    RegOpRecord op;
    op.kind = RegOpRecord::Kind::Write;
    op.proc = p;
    op.start = s;
    op.end = e;
    op.completed = completed;
    op.value = v;
    op.history_len = hlen;
    return op;
  };
  auto read = [](Label p, Tick at, std::optional<Value> v) {
    RegOpRecord op;
    op.kind = RegOpRecord::Kind::Read;
    op.proc = p;
    op.start = op.end = at;
    op.completed = true;
    op.read_empty = !v.has_value();
    op.value = v.value_or(0);
    return op;
  };

  // non-concurrent read returns the maximal-history completed write
  CHECK_FALSE(register_check({write(0, 0, 2, 5, 0), write(1, 3, 6, 9, 1), read(0, 8, 9)}).has_value());
  // returning the shorter-history value instead is illegal
  CHECK(register_check({write(0, 0, 2, 5, 0), write(1, 3, 6, 9, 1), read(0, 8, 5)}).has_value());
  // a read overlapping a write may return it
  CHECK_FALSE(register_check({write(0, 0, 9, 5, 0), read(0, 4, 5)}).has_value());
  // empty is fine before any write completed, illegal after
  CHECK_FALSE(register_check({write(0, 3, 9, 5, 0), read(0, 1, std::nullopt)}).has_value());
  CHECK(register_check({write(0, 0, 2, 5, 0), read(0, 5, std::nullopt)}).has_value());
}

TEST_CASE("crashed adders leave the interval contract intact") {
  Scenario sc;
  sc.algo = AlgoKind::Weakset;
  sc.n = 3;
  sc.horizon = 26;
  sc.seed = 17;
  sc.crashes = {std::nullopt, Round{3}, std::nullopt};
  RunResult run = run_scenario(sc);
  INFO(run.report.to_text());
  CHECK(run.report.all_ok());
}

TEST_CASE("seeded weak-set workloads pass every check in both modes") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Scenario sc;
    sc.algo = AlgoKind::Weakset;
    sc.mode = seed % 2 ? Mode::Lockstep : Mode::Skewed;
    sc.policy = SourcePolicy::Random;
    sc.n = 1 + static_cast<std::uint32_t>(seed % 5);
    sc.horizon = 28;
    sc.seed = seed;
    sc.crash_budget = sc.n > 1 ? sc.n - 1 : 0;
    RunResult run = run_scenario(sc);
    INFO("seed ", seed, "\n", run.report.to_text());
    CHECK(run.report.all_ok());
  }
}

TEST_CASE("seeded register workloads satisfy regularity") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Scenario sc;
    sc.algo = AlgoKind::Weakset;
    sc.n = 2 + static_cast<std::uint32_t>(seed % 3);
    sc.horizon = 30;
    sc.seed = seed;
    sc.crash_budget = 1;
    RegRunResult run = run_register_scenario(sc);
    INFO("seed ", seed, "\n", run.report.to_text());
    CHECK(run.report.all_ok());
  }
}
