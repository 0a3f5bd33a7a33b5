#include "girafsim/weakset.hpp"

#include <algorithm>
#include <map>

namespace girafsim {

namespace {
constexpr std::uint8_t kItemValue = 1;
constexpr std::uint8_t kItemRegisterEntry = 2;
}  // namespace

WsItem ws_item_of_value(Value v) {
  std::string out;
  put_u8(out, kItemValue);
  put_u64(out, v);
  return out;
}

Value ws_item_value(const WsItem& item) {
  ByteReader in(item);
  if (in.u8() != kItemValue) throw ConfigError("not a plain weak-set value");
  Value v = in.u64();
  in.expect_done();
  return v;
}

WsItem ws_item_of_register_entry(Value v, std::uint64_t history_len) {
  std::string out;
  put_u8(out, kItemRegisterEntry);
  put_u64(out, v);
  put_u64(out, history_len);
  return out;
}

bool ws_item_is_register_entry(const WsItem& item) {
  return !item.empty() && static_cast<std::uint8_t>(item[0]) == kItemRegisterEntry;
}

std::pair<Value, std::uint64_t> ws_register_entry(const WsItem& item) {
  ByteReader in(item);
  if (in.u8() != kItemRegisterEntry) throw ConfigError("not a register entry");
  Value v = in.u64();
  std::uint64_t len = in.u64();
  in.expect_done();
  return {v, len};
}

namespace {

SnapshotPtr ws_snapshot(const std::optional<WsItem>& val, const WsSet& proposed, const WsSet& written,
                        bool block) {
  WsSnapshot s;
  s.val = val;
  s.proposed = proposed;
  s.written = written;
  s.block = block;
  return std::make_shared<const Snapshot>(Snapshot(std::move(s)));
}

}  // namespace

PayloadPtr WsAutomaton::initialize(SnapshotSink* snaps) {
  if (snaps) snaps->on_snapshot(SnapPoint::End, ws_snapshot(val_, proposed_, written_, block_));
  return make_payload(proposed_);
}

ComputeOutcome WsAutomaton::compute(Round k, const Inbox& inbox, SnapshotSink* snaps) {
  auto round_payloads = inbox.round(k);
  require(!round_payloads.empty(), "compute with empty round inbox");

  WsSet written = round_payloads[0]->ws_set();
  for (std::size_t i = 1; i < round_payloads.size(); ++i) {
    written = WsSet::intersection(written, round_payloads[i]->ws_set());
  }
  written_ = written;

  // union over all rounds up to k, consumed incrementally off the insertion
  // log; entries for rounds beyond k (early arrivals from processes running
  // ahead) are parked until their round is reached
  std::erase_if(deferred_, [&](const auto& entry) {
    if (entry.first > k) return false;
    proposed_.merge(entry.second->ws_set());
    return true;
  });
  const auto& log = inbox.insertion_log();
  for (; union_cursor_ < log.size(); ++union_cursor_) {
    const auto& [round, payload] = log[union_cursor_];
    if (round > k) {
      deferred_.emplace_back(round, payload);
    } else {
      proposed_.merge(payload->ws_set());
    }
  }

  if (snaps) snaps->on_snapshot(SnapPoint::Mid, ws_snapshot(val_, proposed_, written_, block_));

  if (block_ && val_ && written_.contains(*val_)) {
    block_ = false;
    completion_edge_ = true;
  }

  if (snaps) snaps->on_snapshot(SnapPoint::End, ws_snapshot(val_, proposed_, written_, block_));
  ComputeOutcome out;
  out.message = make_payload(proposed_);
  return out;
}

SnapshotPtr WsAutomaton::snapshot() const { return ws_snapshot(val_, proposed_, written_, block_); }

void WsAutomaton::add(const WsItem& item) {
  require(!block_, "overlapping adds from one process");
  proposed_.insert(item);
  val_ = item;
  block_ = true;
}

bool WsAutomaton::take_add_completion() {
  bool edge = completion_edge_;
  completion_edge_ = false;
  return edge;
}

std::optional<WsViolation> oracle_check(const std::vector<WsOpRecord>& log) {
  for (std::size_t g = 0; g < log.size(); ++g) {
    const WsOpRecord& get = log[g];
    if (get.kind != WsOpRecord::Kind::Get) continue;

    WsSet returned;
    for (const WsItem& v : get.result) returned.insert(v);

    for (std::size_t a = 0; a < log.size(); ++a) {
      const WsOpRecord& add = log[a];
      if (add.kind != WsOpRecord::Kind::Add) continue;
      if (add.completed && add.end < get.start && !returned.contains(add.item)) {
        return WsViolation{g, "get misses an item whose add completed before it began"};
      }
    }

    for (const WsItem& v : get.result) {
      bool started = false;
      for (const WsOpRecord& add : log) {
        if (add.kind == WsOpRecord::Kind::Add && add.item == v && add.start < get.end) {
          started = true;
          break;
        }
      }
      if (!started) return WsViolation{g, "get returns an item no add had started"};
    }
  }
  return std::nullopt;
}

std::vector<WsOpRecord> ws_ops_from_trace(const Trace& t) {
  std::vector<WsOpRecord> out;
  std::map<std::pair<Label, std::uint32_t>, std::size_t> open_adds;
  for (const TraceEvent& e : t.events) {
    switch (e.kind) {
      case TraceEventKind::AddStart: {
        WsOpRecord op;
        op.kind = WsOpRecord::Kind::Add;
        op.proc = e.proc;
        op.start = e.tick;
        op.item = e.op_value;
        op.tag = e.tag;
        open_adds[{e.proc, e.op}] = out.size();
        out.push_back(std::move(op));
        break;
      }
      case TraceEventKind::AddEnd: {
        auto it = open_adds.find({e.proc, e.op});
        if (it == open_adds.end()) throw ConfigError("add completion without start");
        out[it->second].end = e.tick;
        out[it->second].completed = true;
        open_adds.erase(it);
        break;
      }
      case TraceEventKind::Get: {
        WsOpRecord op;
        op.kind = WsOpRecord::Kind::Get;
        op.proc = e.proc;
        op.start = op.end = e.tick;
        op.completed = true;
        op.result = e.op_result;
        op.tag = e.tag;
        out.push_back(std::move(op));
        break;
      }
      default:
        break;
    }
  }
  return out;
}

OracleWeakSet::OracleWeakSet(std::uint32_t n, std::uint64_t seed, std::uint32_t max_delay)
    : n_(n),
      max_delay_(max_delay),
      rng_(seed),
      pending_(n),
      completion_edge_(n, false),
      crashed_(n, false) {}

void OracleWeakSet::add(Label p, const WsItem& item) {
  require(p < n_, "label out of range");
  require(!pending_[p].has_value(), "overlapping adds from one process");
  require(!crashed_[p], "add on crashed process");
  PendingAdd a;
  a.item = item;
  a.visible_at = now_ + rng_.below(max_delay_ + 1);
  a.complete_at = a.visible_at + rng_.below(max_delay_ + 1);
  pending_[p] = std::move(a);
}

bool OracleWeakSet::add_pending(Label p) const { return pending_[p].has_value(); }

bool OracleWeakSet::take_add_completion(Label p) {
  bool edge = completion_edge_[p];
  completion_edge_[p] = false;
  return edge;
}

std::vector<WsItem> OracleWeakSet::get(Label p) const {
  require(p < n_, "label out of range");
  return visible_.items();
}

void OracleWeakSet::step() {
  ++now_;
  for (Label p = 0; p < n_; ++p) {
    if (!pending_[p]) continue;
    PendingAdd& a = *pending_[p];
    if (a.visible_at <= now_) visible_.insert(a.item);
    if (crashed_[p]) continue;  // a crashed adder never completes
    if (a.complete_at <= now_) {
      completion_edge_[p] = true;
      pending_[p].reset();
    }
  }
}

void OracleWeakSet::crash(Label p) { crashed_[p] = true; }

std::optional<Value> register_read_rule(const std::vector<WsItem>& snapshot) {
  std::optional<Value> best;
  std::uint64_t best_len = 0;
  for (const WsItem& item : snapshot) {
    if (!ws_item_is_register_entry(item)) continue;
    auto [v, len] = ws_register_entry(item);
    if (!best || len > best_len || (len == best_len && v > *best)) {
      best = v;
      best_len = len;
    }
  }
  return best;
}

std::optional<RegViolation> register_check(const std::vector<RegOpRecord>& log) {
  for (std::size_t r = 0; r < log.size(); ++r) {
    const RegOpRecord& read = log[r];
    if (read.kind != RegOpRecord::Kind::Read) continue;

    // writes completed strictly before the read began
    std::uint64_t max_len = 0;
    bool any_completed = false;
    for (const RegOpRecord& w : log) {
      if (w.kind != RegOpRecord::Kind::Write) continue;
      if (w.completed && w.end < read.start) {
        any_completed = true;
        max_len = std::max(max_len, w.history_len);
      }
    }

    auto concurrent = [&](const RegOpRecord& w) {
      bool ended_before = w.completed && w.end < read.start;
      bool started_after = w.start > read.end;
      return !ended_before && !started_after;
    };

    if (read.read_empty) {
      if (any_completed) return RegViolation{r, "empty read after a completed write"};
      continue;
    }

    bool legal = false;
    for (const RegOpRecord& w : log) {
      if (w.kind != RegOpRecord::Kind::Write || w.value != read.value) continue;
      if (w.completed && w.end < read.start && w.history_len == max_len) legal = true;
      if (concurrent(w)) legal = true;
      if (legal) break;
    }
    if (!legal) return RegViolation{r, "read returns neither a maximal completed write nor a concurrent one"};
  }
  return std::nullopt;
}

}  // namespace girafsim
