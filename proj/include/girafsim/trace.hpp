#pragma once

// Ordered event log of a run. Every property checker consumes this; it
// serializes to line-delimited text (one event per line) that is bit-exact
// across platforms for a fixed seed.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "girafsim/automaton.hpp"
#include "girafsim/common.hpp"
#include "girafsim/kernel.hpp"

namespace girafsim {

enum class EnvKind : std::uint8_t { MS, ES, ESS };
enum class Mode : std::uint8_t { Lockstep, Skewed };
enum class AlgoKind : std::uint8_t { ES, ESS, Weakset, Emulation };

std::string env_kind_name(EnvKind e);
EnvKind parse_env_kind(const std::string& s);
std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);
std::string algo_kind_name(AlgoKind a);
AlgoKind parse_algo_kind(const std::string& s);

enum class TraceEventKind : std::uint8_t {
  EndOfRound,  // proc entered `round`; digest = its own round message
  Deliver,     // payload with round index `round` inserted at proc's inbox
  Decide,
  Crash,
  Snapshot,
  AddStart,  // weak-set operation records
  AddEnd,
  Get,
};

/// Purpose tag on weak-set operations, so register-level checkers can pair a
/// write's snapshot read with its add.
enum class OpTag : std::uint8_t { Plain, RegSnap, RegRead };

struct TraceEvent {
  TraceEventKind kind{};
  Label proc = 0;
  Round round = 0;
  Tick tick = 0;

  std::uint64_t digest = 0;   // EndOfRound, Deliver
  Label from = kNoLabel;      // Deliver (kNoLabel when the sender is unknown)
  Round at_round = 0;         // Deliver: recipient's round at insertion
  Value value = 0;            // Decide

  SnapPoint point = SnapPoint::Mid;  // Snapshot
  SnapshotPtr snap;                  // Snapshot (in-memory form)
  std::string snap_bytes;            // Snapshot (canonical bytes, parsed form)

  std::uint32_t op = 0;                // ws op index (per process)
  OpTag tag = OpTag::Plain;            // ws op purpose
  std::string op_value;                // AddStart/AddEnd: item bytes
  std::vector<std::string> op_result;  // Get: returned items
};

struct TraceMeta {
  AlgoKind algo = AlgoKind::ES;
  EnvKind env = EnvKind::MS;
  Mode mode = Mode::Lockstep;
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  Round horizon = 0;
  Round kstab = 0;  // 0 = not applicable
  std::optional<Label> stable_source;
  std::uint32_t dmax = 0;
  std::vector<Value> values;
  bool emulated = false;
};

struct Trace {
  TraceMeta meta;
  std::vector<TraceEvent> events;
  /// Owns whatever the snapshots point into (the run's history arena).
  std::shared_ptr<void> arena_keepalive;

  /// Earliest decide round, or nullopt if nobody decided.
  std::optional<Round> first_decide_round() const;
  std::vector<const TraceEvent*> decides() const;

  /// Fill TraceEvent::snap from snap_bytes after parsing.
  void decode_snapshots(std::shared_ptr<HistoryArena> arena);
};

std::string serialize_trace(const Trace& t);
Trace parse_trace(const std::string& text);

/// Event recorder handed to the simulation drivers; assigns ticks in
/// execution order.
class TraceRecorder : public KernelEventSink {
 public:
  explicit TraceRecorder(TraceMeta meta, bool record_snapshots = true, bool record_end_snapshots = true)
      : record_snapshots_(record_snapshots), record_end_snapshots_(record_end_snapshots) {
    trace_.meta = std::move(meta);
  }

  void on_end_of_round(Label p, Round entered, std::uint64_t payload_digest) override;
  void on_deliver(Label p, Round k, Label from, Round at_round, std::uint64_t digest) override;
  void on_decide(Label p, Round k, Value v) override;
  void on_snapshot(Label p, Round k, SnapPoint point, SnapshotPtr snap) override;
  void on_crash(Label p, Round k);

  void add_start(Label p, std::uint32_t op, OpTag tag, const std::string& item);
  void add_end(Label p, std::uint32_t op, OpTag tag, const std::string& item);
  void get(Label p, std::uint32_t op, OpTag tag, std::vector<std::string> result);

  Tick now() const { return next_tick_; }
  Trace take() { return std::move(trace_); }
  const Trace& trace() const { return trace_; }

 private:
  TraceEvent& push(TraceEventKind kind, Label p, Round k);

  Trace trace_;
  Tick next_tick_ = 0;
  bool record_snapshots_;
  bool record_end_snapshots_;
};

}  // namespace girafsim
