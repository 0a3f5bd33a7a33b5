#pragma once

// The adversary's full decision record: which links are timely in which
// round, how late the rest arrive, who crashes when, and where the
// environment stabilizes. Generation and validation are separate so the
// validator doubles as an oracle for hand-built schedules.

#include <optional>
#include <string>
#include <vector>

#include "girafsim/common.hpp"
#include "girafsim/trace.hpp"

namespace girafsim {

enum class SourcePolicy : std::uint8_t { Rotate, Random };

struct Schedule {
  EnvKind env = EnvKind::MS;
  std::uint32_t n = 1;
  Round horizon = 1;
  Round kstab = 0;                    // first all-stable round (ES/ESS)
  std::optional<Label> stable_source; // ESS only
  std::uint32_t dmax = 5;             // max late delay, rounds
  std::uint64_t seed = 0;

  std::vector<std::optional<Round>> crash_round;  // crash before entering that round
  std::vector<std::uint8_t> delay;                // (k-1)*n*n + s*n + j; 0 = timely

  std::uint8_t delay_at(Round k, Label s, Label j) const {
    return delay[static_cast<std::size_t>(k - 1) * n * n + static_cast<std::size_t>(s) * n + j];
  }
  void set_delay(Round k, Label s, Label j, std::uint8_t d) {
    delay[static_cast<std::size_t>(k - 1) * n * n + static_cast<std::size_t>(s) * n + j] = d;
  }
  bool timely(Round k, Label s, Label j) const { return delay_at(k, s, j) == 0; }

  /// Not crashed before entering round k.
  bool alive_at(Label p, Round k) const { return !crash_round[p] || *crash_round[p] > k; }
  /// Never crashes.
  bool correct(Label p) const { return !crash_round[p].has_value(); }
};

struct GenOptions {
  std::optional<Round> kstab;
  std::optional<Label> stable_source;
  SourcePolicy policy = SourcePolicy::Rotate;
  std::uint32_t dmax = 5;
  bool allow_all_crash = false;  // lifts the n-1 default crash cap
  std::optional<std::vector<std::optional<Round>>> crashes;  // explicit placement
};

/// Seeded adversarial schedule satisfying the environment's clauses.
/// Throws ConfigError on infeasible parameters.
Schedule generate_schedule(EnvKind env, std::uint32_t n, Round horizon, std::uint32_t crash_budget,
                           std::uint64_t seed, const GenOptions& opts = {});

struct ScheduleViolation {
  Round round = 0;
  std::string rule;
};

/// Mechanical check of the environment clauses; reports the first failing
/// round and which clause failed.
std::optional<ScheduleViolation> validate_schedule(const Schedule& s);

std::string serialize_schedule(const Schedule& s);
Schedule parse_schedule(const std::string& text);

/// Link behavior as seen by the simulation drivers. The static form wraps a
/// Schedule; the incremental form invents a valid moving-source round on
/// demand, which keeps the clauses satisfied when crash timing is only known
/// at run time (the emulated stack's inner network needs this).
class LinkOracle {
 public:
  virtual ~LinkOracle() = default;
  virtual std::uint8_t delay(Round k, Label s, Label j) = 0;
  virtual std::optional<Round> scheduled_crash(Label p) const = 0;
  virtual std::uint32_t process_count() const = 0;
  virtual Round horizon() const = 0;
  virtual std::uint32_t max_delay() const = 0;
  virtual void note_alive([[maybe_unused]] const std::vector<bool>& alive) {}
};

class StaticLinkOracle : public LinkOracle {
 public:
  explicit StaticLinkOracle(const Schedule& s) : sched_(s) {}
  std::uint8_t delay(Round k, Label s, Label j) override { return sched_.delay_at(k, s, j); }
  std::optional<Round> scheduled_crash(Label p) const override { return sched_.crash_round[p]; }
  std::uint32_t process_count() const override { return sched_.n; }
  Round horizon() const override { return sched_.horizon; }
  std::uint32_t max_delay() const override { return sched_.dmax; }

 private:
  const Schedule& sched_;
};

class IncrementalMsOracle : public LinkOracle {
 public:
  IncrementalMsOracle(std::uint32_t n, Round horizon, std::uint64_t seed, std::uint32_t dmax = 5)
      : n_(n), horizon_(horizon), dmax_(dmax), rng_(seed), alive_(n, true) {}

  std::uint8_t delay(Round k, Label s, Label j) override;
  std::optional<Round> scheduled_crash(Label) const override { return std::nullopt; }
  std::uint32_t process_count() const override { return n_; }
  Round horizon() const override { return horizon_; }
  std::uint32_t max_delay() const override { return dmax_; }
  void note_alive(const std::vector<bool>& alive) override { alive_ = alive; }

 private:
  void ensure_round(Round k);

  std::uint32_t n_;
  Round horizon_;
  std::uint32_t dmax_;
  Rng rng_;
  std::vector<bool> alive_;
  std::vector<std::vector<std::uint8_t>> rows_;  // per generated round
};

}  // namespace girafsim
