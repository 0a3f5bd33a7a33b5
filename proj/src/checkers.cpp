#include "girafsim/checkers.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "girafsim/consensus_ess.hpp"

namespace girafsim {

std::string CheckReport::to_text() const {
  std::ostringstream out;
  for (const auto& [proc, rv] : decisions) {
    out << "decide p=" << proc << " k=" << rv.first << " v=" << rv.second << "\n";
  }
  for (const auto& r : results) {
    if (!r.applicable) {
      out << "PROP " << r.name << " SKIPPED" << (r.detail.empty() ? "" : " " + r.detail) << "\n";
    } else if (r.ok) {
      out << "PROP " << r.name << " OK" << (r.detail.empty() ? "" : " " + r.detail) << "\n";
    } else {
      out << "PROP " << r.name << " VIOLATION " << r.detail << "\n";
    }
  }
  out << "RESULT " << (all_ok() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

namespace {

struct TraceIndex {
  std::uint32_t n = 0;
  // (proc, round) -> entry tick and the process's own round message digest
  std::map<std::pair<Label, Round>, std::pair<Tick, std::uint64_t>> entered;
  // (proc, round) -> tick of the end-of-round that read this round's set
  std::map<std::pair<Label, Round>, Tick> computed;
  // (proc, round) -> (digest, insertion tick), self-delivery included
  std::map<std::pair<Label, Round>, std::vector<std::pair<std::uint64_t, Tick>>> insertions;
  std::vector<bool> crashed;
  std::map<Label, std::pair<Round, Value>> decided;
  Round max_computed = 0;

  bool has_before(Label j, Round k, std::uint64_t digest, Tick before) const {
    auto it = insertions.find({j, k});
    if (it == insertions.end()) return false;
    for (const auto& [d, tick] : it->second) {
      if (d == digest && tick < before) return true;
    }
    return false;
  }

  bool has_ever(Label j, Round k, std::uint64_t digest) const {
    auto it = insertions.find({j, k});
    if (it == insertions.end()) return false;
    for (const auto& [d, tick] : it->second) {
      if (d == digest) return true;
    }
    return false;
  }
};

TraceIndex build_index(const Trace& t) {
  TraceIndex ix;
  ix.n = t.meta.n;
  ix.crashed.assign(ix.n, false);
  for (const TraceEvent& e : t.events) {
    switch (e.kind) {
      case TraceEventKind::EndOfRound:
        ix.entered[{e.proc, e.round}] = {e.tick, e.digest};
        ix.insertions[{e.proc, e.round}].emplace_back(e.digest, e.tick);
        if (e.round >= 2) {
          ix.computed[{e.proc, e.round - 1}] = e.tick;
          ix.max_computed = std::max(ix.max_computed, e.round - 1);
        }
        break;
      case TraceEventKind::Deliver:
        ix.insertions[{e.proc, e.round}].emplace_back(e.digest, e.tick);
        break;
      case TraceEventKind::Decide:
        ix.decided[e.proc] = {e.round, e.value};
        ix.computed[{e.proc, e.round}] = e.tick;
        ix.max_computed = std::max(ix.max_computed, e.round);
        break;
      case TraceEventKind::Crash:
        if (e.proc < ix.n) ix.crashed[e.proc] = true;
        break;
      default:
        break;
    }
  }
  return ix;
}

template <typename S>
const S* snap_as(const TraceEvent& e) {
  if (e.kind != TraceEventKind::Snapshot || !e.snap) return nullptr;
  return std::get_if<S>(e.snap.get());
}

/// Mid snapshots grouped by round, preserving event order.
std::map<Round, std::vector<std::pair<Label, const Snapshot*>>> mid_snapshots(const Trace& t) {
  std::map<Round, std::vector<std::pair<Label, const Snapshot*>>> out;
  for (const TraceEvent& e : t.events) {
    if (e.kind == TraceEventKind::Snapshot && e.point == SnapPoint::Mid && e.snap) {
      out[e.round].emplace_back(e.proc, e.snap.get());
    }
  }
  return out;
}

std::string witness(Round k, const std::string& text) {
  return "round=" + std::to_string(k) + " " + text;
}

// Containment checks shared by the three automaton families; the member
// pointers select which sets participate.
template <typename S, typename SetT>
CheckOutcome containment_check(const Trace& t, SetT S::*from, SetT S::*into, const char* from_name,
                               const char* into_name, bool even_rounds_only,
                               std::string (*elem_text)(const typename std::decay_t<SetT>&, std::size_t)) {
  auto mids = mid_snapshots(t);
  auto first_decide = t.first_decide_round();
  for (const auto& [k, snaps] : mids) {
    if (first_decide && k > *first_decide) break;
    if (even_rounds_only && k % 2 != 0) continue;
    std::vector<std::pair<Label, const S*>> typed;
    for (const auto& [p, snap] : snaps) {
      if (const S* s = std::get_if<S>(snap)) typed.emplace_back(p, s);
    }
    for (const auto& [i, si] : typed) {
      const auto& source_set = si->*from;
      for (std::size_t e = 0; e < source_set.size(); ++e) {
        for (const auto& [j, sj] : typed) {
          if (!(sj->*into).contains(source_set.items()[e])) {
            return TraceViolation{k, witness(k, std::string(from_name) + " of p" + std::to_string(i) + " has " +
                                                    elem_text(source_set, e) + " missing from " + into_name +
                                                    " of p" + std::to_string(j))};
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::string value_set_elem(const ValueSet& s, std::size_t i) { return std::to_string(s.items()[i]); }
std::string bot_set_elem(const BotSet& s, std::size_t i) { return value_or_bot_text(s.items()[i]); }
std::string ws_set_elem(const WsSet& s, std::size_t i) { return bytes_to_hex(s.items()[i]); }

}  // namespace

CheckOutcome check_validity(const Trace& t) {
  ValueSet initials(t.meta.values);
  for (const TraceEvent& e : t.events) {
    if (e.kind == TraceEventKind::Decide && !initials.contains(e.value)) {
      return TraceViolation{e.round, witness(e.round, "p" + std::to_string(e.proc) + " decided " +
                                                          std::to_string(e.value) + ", not an initial value")};
    }
  }
  return std::nullopt;
}

CheckOutcome check_agreement(const Trace& t) {
  std::optional<Value> first;
  std::set<Label> deciders;
  for (const TraceEvent& e : t.events) {
    if (e.kind != TraceEventKind::Decide) continue;
    if (deciders.count(e.proc)) {
      return TraceViolation{e.round, witness(e.round, "p" + std::to_string(e.proc) + " decided twice")};
    }
    deciders.insert(e.proc);
    if (!first) {
      first = e.value;
    } else if (*first != e.value) {
      return TraceViolation{e.round, witness(e.round, "decided values " + std::to_string(*first) + " and " +
                                                          std::to_string(e.value))};
    }
  }
  return std::nullopt;
}

CheckOutcome check_termination(const Trace& t, Round bound) {
  TraceIndex ix = build_index(t);
  for (Label p = 0; p < ix.n; ++p) {
    if (ix.crashed[p]) continue;
    auto it = ix.decided.find(p);
    if (it == ix.decided.end()) {
      return TraceViolation{bound, "p" + std::to_string(p) + " never decided (bound " + std::to_string(bound) + ")"};
    }
    if (it->second.first > bound) {
      return TraceViolation{it->second.first, "p" + std::to_string(p) + " decided at round " +
                                                  std::to_string(it->second.first) + " > bound " +
                                                  std::to_string(bound)};
    }
  }
  return std::nullopt;
}

CheckOutcome check_written_in_all_proposed(const Trace& t) {
  if (auto v = containment_check<EsSnapshot, ValueSet>(t, &EsSnapshot::written, &EsSnapshot::proposed,
                                                       "written", "proposed", false, value_set_elem)) {
    return v;
  }
  if (auto v = containment_check<EssSnapshot, BotSet>(t, &EssSnapshot::written, &EssSnapshot::proposed,
                                                      "written", "proposed", false, bot_set_elem)) {
    return v;
  }
  return containment_check<WsSnapshot, WsSet>(t, &WsSnapshot::written, &WsSnapshot::proposed, "written",
                                              "proposed", false, ws_set_elem);
}

CheckOutcome check_written_old_in_all_written(const Trace& t) {
  if (auto v = containment_check<EsSnapshot, ValueSet>(t, &EsSnapshot::written_old, &EsSnapshot::written,
                                                       "writtenOld", "written", true, value_set_elem)) {
    return v;
  }
  return containment_check<EssSnapshot, BotSet>(t, &EssSnapshot::written_old, &EssSnapshot::written,
                                                "writtenOld", "written", true, bot_set_elem);
}

CheckOutcome check_decision_window_converged(const Trace& t) {
  auto mids = mid_snapshots(t);
  for (const TraceEvent* d : t.decides()) {
    for (Round k = d->round >= 1 ? d->round - 1 : d->round; k <= d->round; ++k) {
      auto it = mids.find(k);
      if (it == mids.end()) continue;
      for (const auto& [p, snap] : it->second) {
        if (p != d->proc) continue;
        if (const auto* es = std::get_if<EsSnapshot>(snap)) {
          for (Value v : es->proposed) {
            if (v != d->value) {
              return TraceViolation{k, witness(k, "pre-decision proposed of p" + std::to_string(p) +
                                                      " holds stray value " + std::to_string(v))};
            }
          }
        } else if (const auto* ess = std::get_if<EssSnapshot>(snap)) {
          for (const ValueOrBot& v : ess->proposed) {
            if (!v.is_bot && v.value != d->value) {
              return TraceViolation{k, witness(k, "pre-decision proposed of p" + std::to_string(p) +
                                                      " holds stray value " + value_or_bot_text(v))};
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

CheckOutcome check_state_sanity(const Trace& t) {
  ValueSet initials(t.meta.values);
  for (const TraceEvent& e : t.events) {
    if (e.kind != TraceEventKind::Snapshot || !e.snap) continue;
    if (const auto* es = snap_as<EsSnapshot>(e)) {
      if (!initials.contains(es->val)) {
        return TraceViolation{e.round, witness(e.round, "val " + std::to_string(es->val) + " is not initial")};
      }
    } else if (const auto* ess = snap_as<EssSnapshot>(e)) {
      if (!initials.contains(ess->val)) {
        return TraceViolation{e.round, witness(e.round, "val " + std::to_string(ess->val) + " is not initial")};
      }
      Round expect = e.point == SnapPoint::Mid ? e.round : e.round + 1;
      if (ess->history == nullptr || ess->history->length != expect) {
        return TraceViolation{e.round, witness(e.round, "history length off for p" + std::to_string(e.proc))};
      }
      if (ess->counters) {
        for (const auto& [h, c] : ess->counters->entries()) {
          if (c > e.round + 1) {
            return TraceViolation{e.round, witness(e.round, "counter " + std::to_string(c) + " exceeds round+1")};
          }
        }
      }
    }
  }
  return std::nullopt;
}

CheckOutcome validate_trace_env(const Trace& t, EnvKind env, const EnvParams& params) {
  TraceIndex ix = build_index(t);
  Round limit = params.upto > 0 ? std::min(params.upto, ix.max_computed) : ix.max_computed;

  for (Round k = 1; k <= limit; ++k) {
    std::vector<Label> finishers;  // correct processes that read round k
    for (Label j = 0; j < ix.n; ++j) {
      if (!ix.crashed[j] && ix.computed.count({j, k})) finishers.push_back(j);
    }
    if (finishers.empty()) continue;

    auto timely_to_all = [&](Label i) {
      auto ent = ix.entered.find({i, k});
      if (ent == ix.entered.end()) return false;
      for (Label j : finishers) {
        if (!ix.has_before(j, k, ent->second.second, ix.computed.at({j, k}))) return false;
      }
      return true;
    };

    bool found = false;
    for (Label i = 0; i < ix.n && !found; ++i) found = timely_to_all(i);
    if (!found) return TraceViolation{k, witness(k, "no realized source")};

    if (env == EnvKind::ES && params.kstab > 0 && k >= params.kstab) {
      for (Label i = 0; i < ix.n; ++i) {
        if (ix.crashed[i] || !ix.entered.count({i, k})) continue;
        if (!timely_to_all(i)) {
          return TraceViolation{k, witness(k, "p" + std::to_string(i) + " not timely after stabilization")};
        }
      }
    }
    if (env == EnvKind::ESS && params.kstab > 0 && k >= params.kstab) {
      require(params.stable_source.has_value(), "ESS validation needs a source");
      Label s = *params.stable_source;
      if (!ix.entered.count({s, k}) || !timely_to_all(s)) {
        return TraceViolation{k, witness(k, "stable source not timely")};
      }
    }
  }
  return std::nullopt;
}

CheckOutcome check_fairness(const Trace& t, std::uint32_t max_gap) {
  TraceIndex ix = build_index(t);
  std::vector<std::uint32_t> since_last(ix.n, 0);
  std::vector<bool> seen(ix.n, false);
  std::vector<bool> stopped(ix.n, false);  // crashed, decided, or reached the horizon

  for (const TraceEvent& e : t.events) {
    if (e.kind == TraceEventKind::Crash || e.kind == TraceEventKind::Decide) {
      if (e.proc < ix.n) stopped[e.proc] = true;
      continue;
    }
    if (e.kind != TraceEventKind::EndOfRound) continue;
    for (Label p = 0; p < ix.n; ++p) {
      if (p == e.proc || stopped[p] || !seen[p]) continue;
      if (++since_last[p] > max_gap) {
        return TraceViolation{e.round, witness(e.round, "p" + std::to_string(p) + " starved beyond " +
                                                            std::to_string(max_gap) + " steps")};
      }
    }
    seen[e.proc] = true;
    since_last[e.proc] = 0;
  }
  return std::nullopt;
}

CheckOutcome check_reliability(const Trace& t) {
  TraceIndex ix = build_index(t);
  for (const auto& [key, td] : ix.entered) {
    auto [i, k] = key;
    for (Label j = 0; j < ix.n; ++j) {
      if (ix.crashed[j]) continue;
      if (!ix.has_ever(j, k, td.second)) {
        return TraceViolation{k, witness(k, "round message of p" + std::to_string(i) + " never reached p" +
                                                std::to_string(j))};
      }
    }
  }
  return std::nullopt;
}

namespace {

struct EssWindow {
  Round begin = 0, end = 0;  // inclusive; end is the last fully usable round
  bool usable = false;
};

// Rounds right after stabilization are still catching up: counters carried
// from the adversarial prefix need a few rounds to wash out before the
// leader structure means anything. The window therefore starts a small
// settle margin past the stabilization round.
constexpr Round kSettleMargin = 3;

EssWindow ess_window(const Trace& t, const TraceIndex& ix, Round kstab) {
  EssWindow w;
  auto first_decide = t.first_decide_round();
  Round end = first_decide ? *first_decide : ix.max_computed;
  if (end <= kstab + 1) return w;
  Round span = end - kstab;
  w.begin = kstab + (span * 3) / 4;
  if (w.begin < kstab + kSettleMargin) w.begin = kstab + kSettleMargin;
  w.end = end;
  w.usable = w.end > w.begin;  // at least two rounds
  return w;
}

std::map<std::pair<Label, Round>, const EssSnapshot*> ess_mids(const Trace& t) {
  std::map<std::pair<Label, Round>, const EssSnapshot*> out;
  for (const TraceEvent& e : t.events) {
    if (e.kind != TraceEventKind::Snapshot || e.point != SnapPoint::Mid || !e.snap) continue;
    if (const auto* s = std::get_if<EssSnapshot>(e.snap.get())) out[{e.proc, e.round}] = s;
  }
  return out;
}

/// Processes the source heard from directly in every window round: the
/// realized stand-in for the group it keeps hearing of.
std::vector<Label> realized_heard_group(const TraceIndex& ix, Label source, const EssWindow& w) {
  std::vector<Label> group;
  for (Label j = 0; j < ix.n; ++j) {
    if (ix.crashed[j]) continue;
    bool all = true;
    for (Round k = w.begin; k <= w.end && all; ++k) {
      auto ent = ix.entered.find({j, k});
      auto cmp = ix.computed.find({source, k});
      all = ent != ix.entered.end() && cmp != ix.computed.end() &&
            ix.has_before(source, k, ent->second.second, cmp->second);
    }
    if (all) group.push_back(j);
  }
  return group;
}

}  // namespace

bool ess_window_usable(const Trace& t, Round kstab) {
  TraceIndex ix = build_index(t);
  return ess_window(t, ix, kstab).usable;
}

CheckOutcome check_counter_growth(const Trace& t, const EssWindowParams& params) {
  TraceIndex ix = build_index(t);
  EssWindow w = ess_window(t, ix, params.kstab);
  if (!w.usable) return std::nullopt;

  auto mids = ess_mids(t);
  std::vector<Label> group = realized_heard_group(ix, params.source, w);
  if (group.empty()) return TraceViolation{w.begin, "source heard nobody across the window"};

  for (Round k = w.begin; k < w.end; ++k) {
    auto hs_now = mids.find({params.source, k});
    auto hs_next = mids.find({params.source, k + 1});
    if (hs_now == mids.end() || hs_next == mids.end()) {
      return TraceViolation{k, witness(k, "source snapshot missing in window")};
    }
    for (Label j : group) {
      auto sj_now = mids.find({j, k});
      auto sj_next = mids.find({j, k + 1});
      if (sj_now == mids.end() || sj_next == mids.end()) {
        return TraceViolation{k, witness(k, "p" + std::to_string(j) + " snapshot missing in window")};
      }
      std::uint64_t before = sj_now->second->counters->get(hs_now->second->history);
      std::uint64_t after = sj_next->second->counters->get(hs_next->second->history);
      if (after != before + 1) {
        return TraceViolation{k, witness(k, "source history counter moved " + std::to_string(before) + " -> " +
                                                std::to_string(after) + " at p" + std::to_string(j))};
      }
    }
  }
  return std::nullopt;
}

CheckOutcome check_leader_window(const Trace& t, const EssWindowParams& params) {
  TraceIndex ix = build_index(t);
  EssWindow w = ess_window(t, ix, params.kstab);
  if (!w.usable) return std::nullopt;

  auto mids = ess_mids(t);
  std::vector<Label> group = realized_heard_group(ix, params.source, w);

  // the leader set must stay non-empty and only ever narrow: counters still
  // catching up right after stabilization can drop members, but nobody may
  // re-enter
  std::optional<std::set<Label>> previous;
  std::set<Label> final_leaders;
  for (Round k = w.begin; k <= w.end; ++k) {
    std::set<Label> leaders;
    for (Label p = 0; p < ix.n; ++p) {
      auto it = mids.find({p, k});
      if (it == mids.end()) continue;
      if (leader_predicate(*it->second->counters, it->second->history)) leaders.insert(p);
    }
    if (leaders.empty()) return TraceViolation{k, witness(k, "no leader in window")};
    if (previous && !std::includes(previous->begin(), previous->end(), leaders.begin(), leaders.end())) {
      return TraceViolation{k, witness(k, "a process re-entered the leader set within the window")};
    }
    previous = leaders;
    final_leaders = std::move(leaders);
  }

  // leadership attaches to histories, not labels: identically-behaving
  // processes share one. A winning history must keep being relayed to the
  // heard group by at least one of its owners
  for (Round k = w.begin; k <= w.end; ++k) {
    for (Label l : final_leaders) {
      auto ls = mids.find({l, k});
      if (ls == mids.end()) return TraceViolation{k, witness(k, "leader skipped a window round")};
      HistoryRef h = ls->second->history;

      bool history_heard = true;
      for (Label j : group) {
        auto cmp = ix.computed.find({j, k});
        if (cmp == ix.computed.end()) continue;
        bool any_owner_timely = false;
        for (Label owner = 0; owner < ix.n && !any_owner_timely; ++owner) {
          auto os = mids.find({owner, k});
          if (os == mids.end() || os->second->history != h) continue;
          auto ent = ix.entered.find({owner, k});
          if (ent == ix.entered.end()) continue;
          any_owner_timely = ix.has_before(j, k, ent->second.second, cmp->second);
        }
        history_heard = history_heard && any_owner_timely;
      }
      if (!history_heard) {
        return TraceViolation{k, witness(k, "leader history " + history_text(h) +
                                                " is not relayed to the heard group")};
      }
    }
  }
  return std::nullopt;
}

CheckOutcome check_ws_intervals(const Trace& t) {
  auto ops = ws_ops_from_trace(t);
  if (auto v = oracle_check(ops)) {
    return TraceViolation{0, "op " + std::to_string(v->op_index) + ": " + v->reason};
  }
  return std::nullopt;
}

CheckOutcome check_ws_liveness(const Trace& t) {
  TraceIndex ix = build_index(t);
  auto ops = ws_ops_from_trace(t);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const WsOpRecord& op = ops[i];
    if (op.kind == WsOpRecord::Kind::Add && !op.completed && !ix.crashed[op.proc]) {
      return TraceViolation{0, "add " + std::to_string(i) + " by correct p" + std::to_string(op.proc) +
                                   " never completed"};
    }
  }
  return std::nullopt;
}

CheckOutcome check_progress(const Trace& t, Round min_rounds) {
  TraceIndex ix = build_index(t);
  std::vector<Round> reached(ix.n, 0);
  for (const auto& [key, td] : ix.entered) reached[key.first] = std::max(reached[key.first], key.second);
  for (Label p = 0; p < ix.n; ++p) {
    if (ix.crashed[p] || ix.decided.count(p)) continue;
    if (reached[p] < min_rounds) {
      return TraceViolation{reached[p], "p" + std::to_string(p) + " reached only round " +
                                            std::to_string(reached[p]) + " of " + std::to_string(min_rounds)};
    }
  }
  return std::nullopt;
}

}  // namespace girafsim
