#include "girafsim/emulation.hpp"

#include <algorithm>

namespace girafsim {

namespace {

/// Weak-set item carrying an emulated bundle: the sender's full round set
/// plus the round index.
WsItem encode_bundle_item(const BroadcastBundle& bundle) {
  std::string out;
  put_u8(out, 9);  // distinct from plain/register item tags
  put_u64(out, bundle.round);
  put_u64(out, bundle.payloads.size());
  // content-sorted so identical bundles collapse to one item
  std::vector<std::string> encoded;
  encoded.reserve(bundle.payloads.size());
  for (const PayloadPtr& p : bundle.payloads) encoded.push_back(encode_payload(*p));
  std::sort(encoded.begin(), encoded.end());
  for (const std::string& e : encoded) put_bytes(out, e);
  return out;
}

BroadcastBundle decode_bundle_item(const WsItem& item, HistoryArena& arena) {
  ByteReader in(item);
  if (in.u8() != 9) throw ConfigError("not an emulated bundle item");
  BroadcastBundle bundle;
  bundle.round = static_cast<Round>(in.u64());
  std::uint64_t count = in.u64();
  for (std::uint64_t i = 0; i < count; ++i) bundle.payloads.push_back(decode_payload(in.bytes(), arena));
  in.expect_done();
  return bundle;
}

}  // namespace

NetworkBackend::NetworkBackend(std::uint32_t n, std::uint64_t seed, Round inner_horizon)
    : links_(n, inner_horizon, mix_seed(seed, 0x1a7e), 3),
      rec_(TraceMeta{AlgoKind::Weakset, EnvKind::MS, Mode::Lockstep, n, seed, inner_horizon, 0,
                     std::nullopt, 3, {}, false},
           /*record_snapshots=*/false),
      completion_edge_(n, false) {
  SimOptions opts;
  opts.mode = Mode::Lockstep;
  opts.seed = seed;
  opts.record_snapshots = false;
  opts.stop_when_quiet = false;  // the outer layer decides when to stop
  engine_ = std::make_unique<SimEngine>(
      links_, [](std::size_t) { return std::make_unique<WsAutomaton>(); }, rec_, opts);
}

NetworkBackend::~NetworkBackend() = default;

WsAutomaton& NetworkBackend::automaton(Label p) const {
  auto* ws = dynamic_cast<WsAutomaton*>(&engine_->process(p).automaton());
  require(ws != nullptr, "network backend holds non-weak-set automata");
  return *ws;
}

void NetworkBackend::add(Label p, const WsItem& item) { automaton(p).add(item); }

bool NetworkBackend::add_pending(Label p) const { return automaton(p).add_pending(); }

bool NetworkBackend::take_add_completion(Label p) {
  bool edge = completion_edge_[p];
  completion_edge_[p] = false;
  return edge;
}

std::vector<WsItem> NetworkBackend::get(Label p) { return automaton(p).get().items(); }

void NetworkBackend::step() {
  if (!engine_->lockstep_tick()) return;
  for (Label p = 0; p < engine_->process_count(); ++p) {
    if (!engine_->process(p).crashed() && automaton(p).take_add_completion()) completion_edge_[p] = true;
  }
}

void NetworkBackend::crash(Label p) { engine_->force_crash(p); }

Trace NetworkBackend::take_inner_trace() {
  engine_->drain();
  return rec_.take();
}

Trace run_emulation(WeakSetBackend& backend, const AutomatonFactory& factory, const EmulationOptions& opts) {
  require(opts.n >= 1, "emulation needs at least one process");

  TraceMeta meta;
  meta.algo = AlgoKind::Emulation;
  meta.env = EnvKind::MS;
  meta.mode = Mode::Lockstep;
  meta.n = opts.n;
  meta.seed = opts.seed;
  meta.horizon = opts.round_target;
  meta.values = opts.values;
  meta.emulated = true;
  TraceRecorder rec(std::move(meta));

  HistoryArena arena;  // decodes bundle payloads flowing back from the set

  std::vector<std::unique_ptr<Process>> procs;
  std::vector<std::set<WsItem>> delivered(opts.n);
  std::vector<bool> booted(opts.n, false);
  std::vector<bool> done(opts.n, false);

  for (Label p = 0; p < opts.n; ++p) procs.push_back(std::make_unique<Process>(p, factory(p)));

  auto crash_due = [&](Label p) {
    return p < opts.crashes.size() && opts.crashes[p] && procs[p]->round() + 1 == *opts.crashes[p];
  };

  auto advance = [&](Label p) {
    // receives drained from the set first, then the next end-of-round, then
    // the outgoing bundle goes into the set
    std::optional<BroadcastBundle> bundle = procs[p]->end_of_round(rec);
    if (!bundle) {
      done[p] = true;  // decided
      return;
    }
    if (procs[p]->round() >= opts.round_target) done[p] = true;
    backend.add(p, encode_bundle_item(*bundle));
  };

  auto boot = [&](Label p) {
    require(!booted[p], "process booted twice");
    booted[p] = true;
    if (crash_due(p)) {
      procs[p]->crash();
      rec.on_crash(p, 0);
      backend.crash(p);
      done[p] = true;
      return;
    }
    advance(p);
  };

  for (Label p = 0; p < opts.n; ++p) boot(p);

  std::uint64_t budget = opts.step_budget ? opts.step_budget
                                          : static_cast<std::uint64_t>(opts.round_target) * opts.n * 16 + 64;
  for (std::uint64_t step = 0; step < budget; ++step) {
    // crashes apply between steps, whether or not an add is in flight
    for (Label p = 0; p < opts.n; ++p) {
      if (!done[p] && crash_due(p)) {
        procs[p]->crash();
        rec.on_crash(p, procs[p]->round());
        backend.crash(p);
        done[p] = true;
      }
    }
    bool anyone = false;
    for (Label p = 0; p < opts.n; ++p) anyone = anyone || !done[p];
    if (!anyone) break;

    backend.step();

    for (Label p = 0; p < opts.n; ++p) {
      if (done[p] || !backend.take_add_completion(p)) continue;
      for (const WsItem& item : backend.get(p)) {
        if (delivered[p].count(item)) continue;
        delivered[p].insert(item);
        BroadcastBundle bundle = decode_bundle_item(item, arena);
        procs[p]->receive(bundle, kNoLabel, rec);
      }
      advance(p);
    }
  }

  return rec.take();
}

}  // namespace girafsim
