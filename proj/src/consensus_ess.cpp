#include "girafsim/consensus_ess.hpp"

#include <algorithm>

namespace girafsim {

CounterMap counter_merge(std::span<const EssMessage* const> received) {
  require(!received.empty(), "counter merge with no messages");

  // step one: min across messages for every history anyone mentions
  std::vector<HistoryRef> keys;
  for (const EssMessage* m : received) {
    for (const auto& [h, _] : m->counter_map().entries()) keys.push_back(h);
    keys.push_back(m->history);
  }
  std::sort(keys.begin(), keys.end(), [](HistoryRef a, HistoryRef b) { return a->id < b->id; });
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  CounterMap merged;
  for (HistoryRef h : keys) {
    std::uint64_t lo = received[0]->counter_map().get(h);
    for (std::size_t i = 1; i < received.size(); ++i) {
      lo = std::min(lo, received[i]->counter_map().get(h));
    }
    merged.set(h, lo);
  }

  // step two: simultaneous bump of each received history, reading the
  // step-one values for the prefix maxima
  std::vector<std::pair<HistoryRef, std::uint64_t>> bumps;
  for (const EssMessage* m : received) {
    std::uint64_t best = 0;
    for (HistoryRef h = m->history; h != nullptr; h = h->parent) {
      best = std::max(best, merged.get(h));
    }
    bumps.emplace_back(m->history, 1 + best);
  }
  for (const auto& [h, v] : bumps) merged.set(h, v);
  return merged;
}

bool leader_predicate(const CounterMap& counters, HistoryRef own) {
  std::uint64_t mine = counters.get(own);
  for (const auto& [h, v] : counters.entries()) {
    if (v > mine) return false;
  }
  return true;
}

EssState ess_initialize(Value initial, HistoryArena& arena) {
  EssState st;
  st.val = initial;
  st.history = arena.root(initial);
  st.counters = std::make_shared<const CounterMap>();
  return st;
}

EssMessage ess_message_of(const EssState& st) {
  EssMessage m;
  m.proposed = st.proposed;
  m.history = st.history;
  m.counters = st.counters;
  return m;
}

void ess_merge(EssState& st, std::span<const EssMessage* const> received) {
  require(!received.empty(), "compute with empty round inbox");
  BotSet written = received[0]->proposed;
  for (std::size_t i = 1; i < received.size(); ++i) {
    written = BotSet::intersection(written, received[i]->proposed);
  }
  for (const EssMessage* m : received) st.proposed.merge(m->proposed);
  st.written = written;
  st.counters = std::make_shared<const CounterMap>(counter_merge(received));
}

EssStepResult ess_finish(EssState& st, Round k, HistoryArena& arena) {
  EssStepResult out;
  if (k % 2 == 0) {
    const ValueOrBot val = ValueOrBot::of(st.val);
    const BotSet just_val(std::vector<ValueOrBot>{val});
    BotSet val_and_bot(std::vector<ValueOrBot>{val, ValueOrBot::bot()});

    if (st.written_old == just_val && st.proposed.subset_of(val_and_bot)) {
      out.decision = st.val;
      return out;
    }

    BotSet non_bot;
    for (const ValueOrBot& v : st.written) {
      if (!v.is_bot) non_bot.insert(v);
    }
    if (!non_bot.empty()) st.val = non_bot.max().value;

    // the proposal guard reads the possibly refreshed value
    const ValueOrBot new_val = ValueOrBot::of(st.val);
    val_and_bot = BotSet(std::vector<ValueOrBot>{new_val, ValueOrBot::bot()});
    if (leader_predicate(*st.counters, st.history) || st.proposed.subset_of(val_and_bot)) {
      st.proposed = BotSet(std::vector<ValueOrBot>{new_val});
    } else {
      st.proposed = BotSet(std::vector<ValueOrBot>{ValueOrBot::bot()});
    }
  }

  st.written_old = st.written;
  st.written = st.proposed;
  st.history = arena.append(st.history, st.val);
  out.message = ess_message_of(st);
  return out;
}

EssStepResult ess_compute(EssState& st, Round k, std::span<const EssMessage* const> received,
                          HistoryArena& arena) {
  ess_merge(st, received);
  return ess_finish(st, k, arena);
}

namespace {

SnapshotPtr make_snapshot(const EssState& st) {
  EssSnapshot s;
  s.val = st.val;
  s.written = st.written;
  s.written_old = st.written_old;
  s.proposed = st.proposed;
  s.history = st.history;
  s.counters = st.counters;
  return std::make_shared<const Snapshot>(std::move(s));
}

}  // namespace

PayloadPtr EssAutomaton::initialize(SnapshotSink* snaps) {
  if (snaps) snaps->on_snapshot(SnapPoint::End, make_snapshot(st_));
  return make_payload(ess_message_of(st_));
}

ComputeOutcome EssAutomaton::compute(Round k, const Inbox& inbox, SnapshotSink* snaps) {
  auto round_payloads = inbox.round(k);
  std::vector<const EssMessage*> received;
  received.reserve(round_payloads.size());
  for (const PayloadPtr& p : round_payloads) received.push_back(&p->ess_message());

  ess_merge(st_, received);
  if (snaps) snaps->on_snapshot(SnapPoint::Mid, make_snapshot(st_));

  EssStepResult step = ess_finish(st_, k, arena_);
  ComputeOutcome out;
  if (step.decision) {
    out.decision = step.decision;
    return out;
  }
  if (snaps) snaps->on_snapshot(SnapPoint::End, make_snapshot(st_));
  out.message = make_payload(*step.message);
  return out;
}

SnapshotPtr EssAutomaton::snapshot() const { return make_snapshot(st_); }

}  // namespace girafsim
