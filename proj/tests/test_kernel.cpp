#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "girafsim/consensus_es.hpp"
#include "girafsim/kernel.hpp"
#include "girafsim/scenario.hpp"
#include "girafsim/trace.hpp"

using namespace girafsim;

namespace {

TraceMeta test_meta(std::uint32_t n) {
  TraceMeta m;
  m.algo = AlgoKind::ES;
  m.env = EnvKind::MS;
  m.n = n;
  m.horizon = 50;
  return m;
}

PayloadPtr vs(std::vector<Value> items) { return make_payload(ValueSet(std::move(items))); }

}  // namespace

TEST_CASE("fresh process broadcasts the empty proposal set at round 1") {
  TraceRecorder rec(test_meta(1));
  Process p(0, std::make_unique<EsAutomaton>(5));

  auto bundle = p.end_of_round(rec);
  REQUIRE(bundle.has_value());
  CHECK(bundle->round == 1);
  REQUIRE(bundle->payloads.size() == 1);
  CHECK(bundle->payloads[0]->value_set().empty());
  CHECK(p.round() == 1);

  // self-delivery: the produced message is already in the round-1 set
  auto own = p.inbox().round(1);
  REQUIRE(own.size() == 1);
  CHECK(payload_equal(*own[0], *bundle->payloads[0]));
}

TEST_CASE("set insertion is idempotent") {
  Inbox inbox;
  CHECK(inbox.insert(4, vs({1, 2})));
  CHECK_FALSE(inbox.insert(4, vs({1, 2})));
  CHECK(inbox.round(4).size() == 1);
}

TEST_CASE("structurally equal payloads from distinct senders collapse to one element") {
  TraceMeta meta = test_meta(3);
  TraceRecorder rec(meta);
  Process recipient(2, std::make_unique<EsAutomaton>(1));

  BroadcastBundle from_a{{vs({4, 9})}, 3};
  BroadcastBundle from_b{{vs({4, 9})}, 3};
  recipient.receive(from_a, 0, rec);
  recipient.receive(from_b, 1, rec);
  CHECK(recipient.inbox().round(3).size() == 1);
}

TEST_CASE("receive unions bundles per round") {
  TraceRecorder rec(test_meta(2));
  Process p(0, std::make_unique<EsAutomaton>(1));
  p.receive(BroadcastBundle{{vs({1}), vs({2})}, 2}, 1, rec);
  p.receive(BroadcastBundle{{vs({2}), vs({3})}, 2}, 1, rec);
  CHECK(p.inbox().round(2).size() == 3);
}

TEST_CASE("delivery to a crashed process has no effect") {
  TraceRecorder rec(test_meta(2));
  Process p(0, std::make_unique<EsAutomaton>(1));
  p.crash();
  p.receive(BroadcastBundle{{vs({1})}, 2}, 1, rec);
  CHECK(p.inbox().round(2).empty());
  CHECK(rec.trace().events.empty());
}

TEST_CASE("late delivery into a passed round still lands") {
  TraceRecorder rec(test_meta(1));
  Process p(0, std::make_unique<RelayAutomaton>(4));
  for (int i = 0; i < 5; ++i) p.end_of_round(rec);
  REQUIRE(p.round() == 5);
  p.receive(BroadcastBundle{{vs({77})}, 2}, 0, rec);
  CHECK(p.inbox().round(2).size() == 2);  // own round-2 message plus the late one
}

TEST_CASE("end_of_round on a crashed or halted process is a harness bug") {
  TraceRecorder rec(test_meta(1));
  Process p(0, std::make_unique<EsAutomaton>(5));
  p.crash();
  CHECK_THROWS_AS(p.end_of_round(rec), HarnessBug);

  Process q(0, std::make_unique<EsAutomaton>(5));
  // a lone process decides at round 4; the next invocation must throw
  for (int i = 0; i < 5; ++i) q.end_of_round(rec);
  REQUIRE(q.halted());
  REQUIRE(q.decision() == Value{5});
  CHECK_THROWS_AS(q.end_of_round(rec), HarnessBug);
}

TEST_CASE("snapshot reflects the automaton state and is stable between steps") {
  TraceRecorder rec(test_meta(1));
  Process p(0, std::make_unique<EsAutomaton>(5));

  auto snap = p.snapshot();
  const auto* es = std::get_if<EsSnapshot>(snap.get());
  REQUIRE(es != nullptr);
  CHECK(es->val == 5);
  CHECK(es->written.empty());
  CHECK(es->written_old.empty());
  CHECK(es->proposed.empty());

  auto again = p.snapshot();
  CHECK(encode_snapshot(*snap) == encode_snapshot(*again));

  // crashing freezes the automaton; the last pre-crash state stays readable
  p.end_of_round(rec);
  std::string before = encode_snapshot(*p.snapshot());
  p.crash();
  CHECK(encode_snapshot(*p.snapshot()) == before);
}

TEST_CASE("round counter equals the number of end-of-round invocations") {
  TraceRecorder rec(test_meta(1));
  Process p(0, std::make_unique<EsAutomaton>(2));
  for (Round k = 1; k <= 4; ++k) {
    p.end_of_round(rec);
    CHECK(p.round() == k);
  }
}

TEST_CASE("identical delivery sequences replay to identical event streams") {
  auto run_once = [] {
    TraceRecorder rec(test_meta(2));
    Process p(0, std::make_unique<EsAutomaton>(3));
    p.end_of_round(rec);
    p.receive(BroadcastBundle{{vs({7})}, 1}, 1, rec);
    p.end_of_round(rec);
    p.end_of_round(rec);
    Trace t = rec.take();
    return serialize_trace(t);
  };
  CHECK(run_once() == run_once());
}
