#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "girafsim/schedule.hpp"

using namespace girafsim;

TEST_CASE("a lone process is its own source in every round") {
  Schedule s = generate_schedule(EnvKind::MS, 1, 10, 0, 42);
  for (Round k = 1; k <= 10; ++k) CHECK(s.timely(k, 0, 0));
  CHECK_FALSE(validate_schedule(s).has_value());
}

TEST_CASE("stabilized rounds are fully timely in ES") {
  GenOptions g;
  g.kstab = 8;
  Schedule s = generate_schedule(EnvKind::ES, 3, 20, 0, 7, g);
  for (Round k = 8; k <= 20; ++k) {
    for (Label i = 0; i < 3; ++i) {
      for (Label j = 0; j < 3; ++j) CHECK(s.timely(k, i, j));
    }
  }
  CHECK_FALSE(validate_schedule(s).has_value());
}

TEST_CASE("the stable source covers everyone after stabilization in ESS") {
  GenOptions g;
  g.kstab = 10;
  g.stable_source = 2;
  Schedule s = generate_schedule(EnvKind::ESS, 4, 40, 0, 3, g);
  REQUIRE(s.stable_source == Label{2});
  for (Round k = 10; k <= 40; ++k) {
    for (Label j = 0; j < 4; ++j) CHECK(s.timely(k, 2, j));
  }
  CHECK_FALSE(validate_schedule(s).has_value());
}

TEST_CASE("generate then validate holds across seeds, environments and modes") {
  for (std::uint64_t seed = 1; seed <= 600; ++seed) {
    EnvKind env = seed % 3 == 0 ? EnvKind::MS : (seed % 3 == 1 ? EnvKind::ES : EnvKind::ESS);
    std::uint32_t n = 1 + static_cast<std::uint32_t>(seed % 6);
    GenOptions g;
    g.policy = seed % 2 ? SourcePolicy::Random : SourcePolicy::Rotate;
    Schedule s = generate_schedule(env, n, 20 + seed % 20, n - 1, seed, g);
    auto v = validate_schedule(s);
    INFO("seed ", seed, " env ", env_kind_name(env));
    if (v) INFO("violation at round ", v->round, ": ", v->rule);
    CHECK_FALSE(v.has_value());
  }
}

TEST_CASE("a round without any all-covering sender is flagged") {
  Schedule s = generate_schedule(EnvKind::MS, 3, 10, 0, 5);
  for (Label i = 0; i < 3; ++i) {
    for (Label j = 0; j < 3; ++j) {
      if (i != j) s.set_delay(5, i, j, 2);
    }
  }
  auto v = validate_schedule(s);
  REQUIRE(v.has_value());
  CHECK(v->round == 5);
  CHECK(v->rule == "no source");
}

TEST_CASE("an unstable link after stabilization is flagged for ES") {
  GenOptions g;
  g.kstab = 4;
  Schedule s = generate_schedule(EnvKind::ES, 2, 10, 0, 5, g);
  s.set_delay(7, 0, 1, 3);
  auto v = validate_schedule(s);
  REQUIRE(v.has_value());
  CHECK(v->round == 7);
}

TEST_CASE("a crashing stable source is rejected") {
  GenOptions g;
  g.kstab = 5;
  g.stable_source = 1;
  std::vector<std::optional<Round>> crashes(3);
  crashes[1] = 8;
  g.crashes = crashes;
  CHECK_THROWS_AS(generate_schedule(EnvKind::ESS, 3, 20, 0, 5, g), ConfigError);

  // and the validator catches it on a hand-built schedule
  GenOptions trap;
  trap.kstab = 5;
  trap.stable_source = 1;
  Schedule s = generate_schedule(EnvKind::ESS, 3, 20, 0, 5, trap);
  s.crash_round[1] = 8;
  auto v = validate_schedule(s);
  REQUIRE(v.has_value());
  CHECK(v->rule == "stable source crashes");
}

TEST_CASE("late delays stay within the bound") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Schedule s = generate_schedule(EnvKind::MS, 4, 25, 3, seed);
    for (Round k = 1; k <= s.horizon; ++k) {
      for (Label i = 0; i < s.n; ++i) {
        for (Label j = 0; j < s.n; ++j) CHECK(s.delay_at(k, i, j) <= s.dmax);
      }
    }
  }
}

TEST_CASE("schedules round-trip through their text form") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GenOptions g;
    g.kstab = 6;
    Schedule s = generate_schedule(seed % 2 ? EnvKind::ESS : EnvKind::ES, 3, 15, 2, seed, g);
    Schedule parsed = parse_schedule(serialize_schedule(s));
    CHECK(parsed.env == s.env);
    CHECK(parsed.n == s.n);
    CHECK(parsed.horizon == s.horizon);
    CHECK(parsed.kstab == s.kstab);
    CHECK(parsed.stable_source == s.stable_source);
    CHECK(parsed.crash_round == s.crash_round);
    CHECK(parsed.delay == s.delay);
    CHECK(serialize_schedule(parsed) == serialize_schedule(s));
  }
}

TEST_CASE("infeasible parameters are construction errors") {
  CHECK_THROWS_AS(generate_schedule(EnvKind::MS, 0, 10, 0, 1), ConfigError);
  GenOptions g;
  g.kstab = 50;
  CHECK_THROWS_AS(generate_schedule(EnvKind::ES, 2, 10, 0, 1, g), ConfigError);
  GenOptions g2;
  g2.stable_source = 9;
  CHECK_THROWS_AS(generate_schedule(EnvKind::ESS, 2, 10, 0, 1, g2), ConfigError);
}

TEST_CASE("all-crash schedules stay valid (obligations go vacuous)") {
  GenOptions g;
  g.allow_all_crash = true;
  std::vector<std::optional<Round>> crashes = {Round{3}, Round{5}};
  g.crashes = crashes;
  Schedule s = generate_schedule(EnvKind::MS, 2, 12, 2, 9, g);
  CHECK_FALSE(validate_schedule(s).has_value());
}
