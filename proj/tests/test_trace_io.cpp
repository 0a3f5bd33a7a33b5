#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "girafsim/checkers.hpp"
#include "girafsim/scenario.hpp"

using namespace girafsim;

namespace {

bool events_equal(const TraceEvent& a, const TraceEvent& b) {
  if (a.kind != b.kind || a.proc != b.proc || a.round != b.round || a.tick != b.tick) return false;
  switch (a.kind) {
    case TraceEventKind::EndOfRound:
      return a.digest == b.digest;
    case TraceEventKind::Deliver:
      return a.digest == b.digest && a.from == b.from && a.at_round == b.at_round;
    case TraceEventKind::Decide:
      return a.value == b.value;
    case TraceEventKind::Snapshot: {
      std::string ba = a.snap ? encode_snapshot(*a.snap) : a.snap_bytes;
      std::string bb = b.snap ? encode_snapshot(*b.snap) : b.snap_bytes;
      return a.point == b.point && ba == bb;
    }
    case TraceEventKind::AddStart:
    case TraceEventKind::AddEnd:
      return a.op == b.op && a.tag == b.tag && a.op_value == b.op_value;
    case TraceEventKind::Get:
      return a.op == b.op && a.tag == b.tag && a.op_result == b.op_result;
    case TraceEventKind::Crash:
      return true;
  }
  return true;
}

}  // namespace

TEST_CASE("traces round-trip through their text form") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Scenario sc;
    sc.algo = seed % 2 ? AlgoKind::ES : AlgoKind::ESS;
    sc.env = EnvKind::MS;
    sc.mode = seed % 3 == 0 ? Mode::Skewed : Mode::Lockstep;
    sc.n = 1 + static_cast<std::uint32_t>(seed % 3);
    for (std::uint32_t i = 0; i < sc.n; ++i) sc.values.push_back(seed + i);
    sc.horizon = 12;
    sc.seed = seed;
    sc.crash_budget = sc.n - 1;

    Trace original = run_scenario(sc).trace;
    std::string text = serialize_trace(original);
    Trace parsed = parse_trace(text);

    CHECK(parsed.meta.algo == original.meta.algo);
    CHECK(parsed.meta.values == original.meta.values);
    REQUIRE(parsed.events.size() == original.events.size());
    for (std::size_t i = 0; i < parsed.events.size(); ++i) {
      CHECK(events_equal(parsed.events[i], original.events[i]));
    }
    CHECK(serialize_trace(parsed) == text);
  }
}

TEST_CASE("weak-set op records survive the round trip") {
  Scenario sc;
  sc.algo = AlgoKind::Weakset;
  sc.n = 3;
  sc.horizon = 30;
  sc.seed = 4;
  Trace original = run_scenario(sc).trace;
  Trace parsed = parse_trace(serialize_trace(original));
  auto a = ws_ops_from_trace(original);
  auto b = ws_ops_from_trace(parsed);
  REQUIRE(a.size() == b.size());
  CHECK(!a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].item == b[i].item);
    CHECK(a[i].start == b[i].start);
    CHECK(a[i].end == b[i].end);
    CHECK(a[i].completed == b[i].completed);
    CHECK(a[i].result == b[i].result);
  }
}

TEST_CASE("malformed traces are rejected") {
  CHECK_THROWS_AS(parse_trace("nonsense"), ConfigError);
  CHECK_THROWS_AS(parse_trace("#girafsim-trace v1\neor p=0\n"), ConfigError);
  CHECK_THROWS_AS(parse_trace("#girafsim-trace v1\nwat p=0 k=1 t=0\n"), ConfigError);
  CHECK_THROWS_AS(parse_trace("#girafsim-trace v1\n"), ConfigError);  // no meta
}

TEST_CASE("re-checking a stored trace reproduces the verdicts") {
  Scenario sc = demo_es_pair();
  RunResult run = run_scenario(sc);

  Trace parsed = parse_trace(serialize_trace(run.trace));
  parsed.decode_snapshots(std::make_shared<HistoryArena>());
  CheckReport replay = check_trace(parsed);
  CHECK(replay.all_ok());
  CHECK(replay.decisions == run.report.decisions);
}

TEST_CASE("stable-source snapshots survive the byte round trip for re-checking") {
  Scenario sc;
  sc.algo = AlgoKind::ESS;
  sc.env = EnvKind::ESS;
  sc.n = 3;
  sc.values = {2, 8, 5};
  sc.kstab = 6;
  sc.horizon = 124;
  sc.seed = 11;
  RunResult run = run_scenario(sc);
  REQUIRE(run.report.all_ok());

  Trace parsed = parse_trace(serialize_trace(run.trace));
  parsed.decode_snapshots(std::make_shared<HistoryArena>());
  CheckReport replay = check_trace(parsed);
  INFO(replay.to_text());
  CHECK(replay.all_ok());
  CHECK(replay.decisions == run.report.decisions);

  // decoded counter maps re-encode to the same bytes
  std::string again = serialize_trace(parsed);
  CHECK(again == serialize_trace(run.trace));
}

TEST_CASE("a forged second decision trips agreement on replay") {
  RunResult run = run_scenario(demo_es_pair());
  std::string text = serialize_trace(run.trace);
  auto pos = text.find("decide p=1 k=6 v=7");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 18, "decide p=1 k=6 v=3");

  Trace forged = parse_trace(text);
  forged.decode_snapshots(std::make_shared<HistoryArena>());
  CheckReport report = check_trace(forged, {"agreement"});
  REQUIRE(report.results.size() == 1);
  CHECK_FALSE(report.results[0].ok);
}

TEST_CASE("payload encodings round-trip with identical digests") {
  HistoryArena arena;
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    PayloadPtr original;
    switch (rng.below(3)) {
      case 0: {
        ValueSet s;
        for (std::uint64_t j = rng.below(5); j > 0; --j) s.insert(rng.below(50));
        original = make_payload(std::move(s));
        break;
      }
      case 1: {
        WsSet s;
        for (std::uint64_t j = rng.below(4); j > 0; --j) {
          std::string item;
          for (std::uint64_t b = 1 + rng.below(6); b > 0; --b) item.push_back(static_cast<char>(rng.below(256)));
          s.insert(item);
        }
        original = make_payload(std::move(s));
        break;
      }
      default: {
        EssMessage m;
        for (std::uint64_t j = rng.below(3); j > 0; --j) m.proposed.insert(ValueOrBot::of(rng.below(9)));
        if (rng.chance(1, 2)) m.proposed.insert(ValueOrBot::bot());
        std::vector<Value> hist;
        for (std::uint64_t j = 1 + rng.below(4); j > 0; --j) hist.push_back(rng.below(9));
        m.history = arena.from_values(hist);
        CounterMap c;
        for (std::uint64_t j = rng.below(3); j > 0; --j) {
          c.set(arena.from_values({rng.below(9), rng.below(9)}), rng.below(20));
        }
        m.counters = std::make_shared<const CounterMap>(std::move(c));
        original = make_payload(std::move(m));
        break;
      }
    }
    // decode into a fresh arena: content equality and digests must survive
    HistoryArena other;
    PayloadPtr back = decode_payload(encode_payload(*original), other);
    CHECK(back->digest == original->digest);
    CHECK(encode_payload(*back) == encode_payload(*original));
  }
}

TEST_CASE("scenario files round-trip") {
  Scenario sc = demo_ess_single();
  sc.crashes.assign(sc.n, std::nullopt);
  sc.out = "demo.trace";
  Scenario parsed = parse_scenario(serialize_scenario(sc));
  CHECK(parsed.algo == sc.algo);
  CHECK(parsed.env == sc.env);
  CHECK(parsed.n == sc.n);
  CHECK(parsed.values == sc.values);
  CHECK(parsed.horizon == sc.horizon);
  CHECK(parsed.out == sc.out);
  CHECK(serialize_scenario(parsed) == serialize_scenario(sc));
}

TEST_CASE("bad scenario keys are configuration errors") {
  CHECK_THROWS_AS(parse_scenario("#girafsim-scenario v1\nbogus 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("no header"), ConfigError);
}
