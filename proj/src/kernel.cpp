#include "girafsim/kernel.hpp"

#include <algorithm>

namespace girafsim {

bool Inbox::insert(Round k, const PayloadPtr& p) {
  require(k >= 1, "round indices start at 1");
  if (by_round_.size() <= k) by_round_.resize(k + 1);
  auto& slot = by_round_[k];
  // sorted by (digest, deep compare) so lookups stay deterministic
  auto pos = std::lower_bound(slot.begin(), slot.end(), p, [](const PayloadPtr& a, const PayloadPtr& b) {
    return a->digest < b->digest;
  });
  for (auto it = pos; it != slot.end() && (*it)->digest == p->digest; ++it) {
    if (payload_equal(**it, *p)) return false;
  }
  slot.insert(pos, p);
  log_.emplace_back(k, p);
  return true;
}

std::span<const PayloadPtr> Inbox::round(Round k) const {
  if (k >= by_round_.size()) return {};
  return by_round_[k];
}

namespace {

class LabelledSnapshotSink : public SnapshotSink {
 public:
  LabelledSnapshotSink(Label p, Round k, KernelEventSink& out) : p_(p), k_(k), out_(out) {}
  void on_snapshot(SnapPoint point, SnapshotPtr snap) override { out_.on_snapshot(p_, k_, point, std::move(snap)); }

 private:
  Label p_;
  Round k_;
  KernelEventSink& out_;
};

}  // namespace

std::optional<BroadcastBundle> Process::end_of_round(KernelEventSink& sink) {
  require(!crashed_, "end_of_round on crashed process");
  require(!halted_, "end_of_round on halted process");

  PayloadPtr message;
  if (round_ == 0) {
    LabelledSnapshotSink snaps(label_, 0, sink);
    message = automaton_->initialize(&snaps);
    require(message != nullptr, "initialize produced no message");
  } else {
    LabelledSnapshotSink snaps(label_, round_, sink);
    ComputeOutcome out = automaton_->compute(round_, inbox_, &snaps);
    if (out.decision.has_value()) {
      decision_ = out.decision;
      halted_ = true;
      sink.on_decide(label_, round_, *out.decision);
      return std::nullopt;
    }
    require(out.message != nullptr, "compute produced neither message nor decision");
    message = out.message;
  }

  Round next = round_ + 1;
  inbox_.insert(next, message);
  round_ = next;
  sink.on_end_of_round(label_, round_, message->digest);

  BroadcastBundle bundle;
  bundle.round = round_;
  auto current = inbox_.round(round_);
  bundle.payloads.assign(current.begin(), current.end());
  return bundle;
}

void Process::receive(const BroadcastBundle& bundle, Label from, KernelEventSink& sink) {
  if (crashed_) return;  // crashed processes take no steps
  for (const PayloadPtr& p : bundle.payloads) {
    if (inbox_.insert(bundle.round, p)) {
      sink.on_deliver(label_, bundle.round, from, round_, p->digest);
    }
  }
}

}  // namespace girafsim
