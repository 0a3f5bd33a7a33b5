#include "girafsim/sim.hpp"

#include <algorithm>

namespace girafsim {

SimEngine::SimEngine(LinkOracle& links, const AutomatonFactory& factory, TraceRecorder& recorder,
                     const SimOptions& opts)
    : links_(links), rec_(recorder), opts_(opts), n_(links.process_count()), rng_(mix_seed(opts.seed, 0x5eed)) {
  for (Label p = 0; p < n_; ++p) {
    procs_.push_back(std::make_unique<Process>(p, factory(p)));
  }
}

bool SimEngine::any_active() const {
  for (const auto& p : procs_) {
    if (p->active()) return true;
  }
  return false;
}

std::vector<bool> SimEngine::alive_mask() const {
  std::vector<bool> alive(n_);
  for (Label p = 0; p < n_; ++p) alive[p] = !procs_[p]->crashed();
  return alive;
}

void SimEngine::force_crash(Label p) {
  require(p < n_, "label out of range");
  if (procs_[p]->crashed()) return;
  procs_[p]->crash();
  rec_.on_crash(p, procs_[p]->round());
}

void SimEngine::apply_scheduled_crashes_lockstep() {
  for (Label p = 0; p < n_; ++p) {
    auto cr = links_.scheduled_crash(p);
    if (cr && *cr == tick_ && !procs_[p]->crashed()) force_crash(p);
  }
}

void SimEngine::apply_scheduled_crashes_skewed() {
  for (Label p = 0; p < n_; ++p) {
    auto cr = links_.scheduled_crash(p);
    if (cr && !procs_[p]->crashed() && procs_[p]->round() + 1 == *cr) force_crash(p);
  }
}

void SimEngine::execute_step(Label p, SimHook* hook, bool inline_hooks) {
  Process& proc = *procs_[p];
  if (hook && inline_hooks) hook->before_end_of_round(p, proc.round() + 1, *this);
  if (!proc.active()) return;

  std::optional<BroadcastBundle> bundle;
  try {
    bundle = proc.end_of_round(rec_);
  } catch (const HarnessBug&) {
    throw;
  } catch (const std::exception& e) {
    throw SimAbort(std::string("automaton failure at process ") + std::to_string(p) + ": " + e.what(),
                   rec_.take());
  }
  if (hook && inline_hooks) hook->after_end_of_round(p, *this);
  if (bundle) dispatch(p, *bundle);
}

void SimEngine::dispatch(Label from, const BroadcastBundle& bundle) {
  // broadcast is all-or-nothing: once dispatched it reaches every correct
  // process, timely or late as the schedule dictates
  for (Label j = 0; j < n_; ++j) {
    if (procs_[j]->crashed()) continue;
    std::uint8_t d = links_.delay(bundle.round, from, j);
    if (d == 0) {
      if (opts_.mode == Mode::Lockstep) {
        PendingDelivery pd;
        pd.due_tick = tick_;  // delivered after this tick's end-of-round phase
        pd.seq = seq_++;
        pd.to = j;
        pd.from = from;
        pd.bundle = bundle;
        pending_.push_back(std::move(pd));
      } else {
        procs_[j]->receive(bundle, from, rec_);
      }
    } else {
      PendingDelivery pd;
      pd.due_tick = tick_ + d;
      pd.due_round = bundle.round + d;
      pd.seq = seq_++;
      pd.to = j;
      pd.from = from;
      pd.bundle = bundle;
      pending_.push_back(std::move(pd));
      if (opts_.mode == Mode::Skewed && procs_[j]->round() >= pd.due_round) flush_due_skewed(j);
    }
  }
}

void SimEngine::deliver_due_lockstep() {
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const PendingDelivery& a, const PendingDelivery& b) {
                     if (a.due_tick != b.due_tick) return a.due_tick < b.due_tick;
                     return a.seq < b.seq;
                   });
  std::size_t i = 0;
  for (; i < pending_.size() && pending_[i].due_tick <= tick_; ++i) {
    PendingDelivery& pd = pending_[i];
    procs_[pd.to]->receive(pd.bundle, pd.from, rec_);
  }
  pending_.erase(pending_.begin(), pending_.begin() + i);
}

void SimEngine::flush_due_skewed(Label p) {
  // late bundles land once the recipient has moved `delay` rounds past the
  // sender's round, i.e. after its (k+d)-th end-of-round
  std::vector<PendingDelivery> keep;
  keep.reserve(pending_.size());
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const PendingDelivery& a, const PendingDelivery& b) { return a.seq < b.seq; });
  for (PendingDelivery& pd : pending_) {
    if (pd.to == p && pd.due_round <= procs_[p]->round()) {
      procs_[pd.to]->receive(pd.bundle, pd.from, rec_);
    } else {
      keep.push_back(std::move(pd));
    }
  }
  pending_ = std::move(keep);
}

bool SimEngine::lockstep_tick(SimHook* hook) {
  if (tick_ >= links_.horizon()) return false;
  ++tick_;
  apply_scheduled_crashes_lockstep();
  links_.note_alive(alive_mask());
  if (opts_.stop_when_quiet && !any_active()) return false;

  // application ops happen strictly between kernel steps: every hook runs
  // before any compute of this tick, completions are observed after all of
  // them, so an op never sees a half-advanced tick
  if (hook) {
    for (Label p = 0; p < n_; ++p) {
      if (procs_[p]->active()) hook->before_end_of_round(p, procs_[p]->round() + 1, *this);
    }
  }
  for (Label p = 0; p < n_; ++p) {
    if (procs_[p]->active()) execute_step(p, hook, /*inline_hooks=*/false);
  }
  if (hook) {
    for (Label p = 0; p < n_; ++p) {
      if (!procs_[p]->crashed()) hook->after_end_of_round(p, *this);
    }
  }
  deliver_due_lockstep();
  return true;
}

bool SimEngine::ready_skewed(Label p) {
  const Process& proc = *procs_[p];
  Round next = proc.round();  // round index the pending compute will read
  if (next == 0) return true;

  Round min_active = 0xffffffff;
  for (Label q = 0; q < n_; ++q) {
    if (procs_[q]->active()) min_active = std::min(min_active, procs_[q]->round());
  }
  if (proc.round() > min_active + opts_.skew_cap) return false;

  // a timely sender that has not yet produced its message for this round
  // forces the environment to hold this end-of-round back
  for (Label i = 0; i < n_; ++i) {
    if (i == p || !procs_[i]->active()) continue;
    if (procs_[i]->round() < next && links_.delay(next, i, p) == 0) return false;
  }
  return true;
}

void SimEngine::run_skewed(SimHook* hook) {
  require(opts_.mode == Mode::Skewed, "run_skewed in lockstep mode");
  apply_scheduled_crashes_skewed();
  links_.note_alive(alive_mask());

  std::vector<Label> order(n_);
  for (Label p = 0; p < n_; ++p) order[p] = p;

  while (true) {
    // seeded sweep order; every active process gets offered one step
    for (std::size_t i = n_; i > 1; --i) {
      std::swap(order[i - 1], order[rng_.below(i)]);
    }
    bool progressed = false;
    for (Label p : order) {
      Process& proc = *procs_[p];
      if (!proc.active() || proc.round() >= links_.horizon()) continue;
      if (!ready_skewed(p)) continue;
      execute_step(p, hook, /*inline_hooks=*/true);
      if (procs_[p]->active()) flush_due_skewed(p);
      apply_scheduled_crashes_skewed();
      links_.note_alive(alive_mask());
      progressed = true;
    }
    if (!progressed) break;
    if (opts_.stop_when_quiet && !any_active()) break;
  }
}

void SimEngine::drain() {
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const PendingDelivery& a, const PendingDelivery& b) {
                     if (a.due_tick != b.due_tick) return a.due_tick < b.due_tick;
                     return a.seq < b.seq;
                   });
  for (PendingDelivery& pd : pending_) {
    procs_[pd.to]->receive(pd.bundle, pd.from, rec_);
  }
  pending_.clear();
}

Trace run_simulation(const Schedule& sched, const AutomatonFactory& factory, const SimOptions& opts,
                     SimHook* hook, TraceMeta meta) {
  StaticLinkOracle links(sched);
  if (meta.n == 0) {
    meta.n = sched.n;
    meta.env = sched.env;
    meta.horizon = sched.horizon;
    meta.kstab = sched.kstab;
    meta.stable_source = sched.stable_source;
    meta.dmax = sched.dmax;
    meta.seed = sched.seed;
    meta.mode = opts.mode;
  }
  TraceRecorder rec(std::move(meta), opts.record_snapshots, opts.record_end_snapshots);
  SimEngine engine(links, factory, rec, opts);
  if (opts.mode == Mode::Lockstep) {
    while (engine.lockstep_tick(hook)) {
    }
  } else {
    engine.run_skewed(hook);
  }
  engine.drain();
  return rec.take();
}

TraceMeta meta_for(const Schedule& sched, AlgoKind algo, Mode mode, const std::vector<Value>& values) {
  TraceMeta meta;
  meta.algo = algo;
  meta.env = sched.env;
  meta.mode = mode;
  meta.n = sched.n;
  meta.seed = sched.seed;
  meta.horizon = sched.horizon;
  meta.kstab = sched.kstab;
  meta.stable_source = sched.stable_source;
  meta.dmax = sched.dmax;
  meta.values = values;
  return meta;
}

}  // namespace girafsim
