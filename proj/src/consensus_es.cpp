#include "girafsim/consensus_es.hpp"

namespace girafsim {

namespace {

SnapshotPtr make_snapshot(const EsState& st) {
  EsSnapshot s;
  s.val = st.val;
  s.written = st.written;
  s.written_old = st.written_old;
  s.proposed = st.proposed;
  return std::make_shared<const Snapshot>(std::move(s));
}

}  // namespace

EsState es_initialize(Value initial) {
  EsState st;
  st.val = initial;
  return st;
}

void es_merge(EsState& st, std::span<const ValueSet* const> received) {
  require(!received.empty(), "compute with empty round inbox");
  ValueSet written = *received[0];
  for (std::size_t i = 1; i < received.size(); ++i) {
    written = ValueSet::intersection(written, *received[i]);
  }
  for (const ValueSet* m : received) st.proposed.merge(*m);
  st.written = written;
}

EsStepResult es_finish(EsState& st, Round k) {
  EsStepResult out;
  if (k % 2 == 0) {
    const ValueSet just_val(std::vector<Value>{st.val});
    if (st.proposed == just_val && st.written_old == just_val) {
      out.decision = st.val;
      return out;
    }
    if (!st.written.empty()) st.val = st.written.max();
    st.proposed = ValueSet(std::vector<Value>{st.val});
  }
  st.written_old = st.written;
  out.message = st.proposed;
  return out;
}

EsStepResult es_compute(EsState& st, Round k, std::span<const ValueSet* const> received) {
  es_merge(st, received);
  return es_finish(st, k);
}

PayloadPtr EsAutomaton::initialize(SnapshotSink* snaps) {
  if (snaps) snaps->on_snapshot(SnapPoint::End, make_snapshot(st_));
  return make_payload(st_.proposed);
}

ComputeOutcome EsAutomaton::compute(Round k, const Inbox& inbox, SnapshotSink* snaps) {
  auto round_payloads = inbox.round(k);
  std::vector<const ValueSet*> received;
  received.reserve(round_payloads.size());
  for (const PayloadPtr& p : round_payloads) received.push_back(&p->value_set());

  es_merge(st_, received);
  if (snaps) snaps->on_snapshot(SnapPoint::Mid, make_snapshot(st_));

  EsStepResult step = es_finish(st_, k);
  ComputeOutcome out;
  if (step.decision) {
    out.decision = step.decision;
    return out;
  }
  if (snaps) snaps->on_snapshot(SnapPoint::End, make_snapshot(st_));
  out.message = make_payload(step.message);
  return out;
}

SnapshotPtr EsAutomaton::snapshot() const { return make_snapshot(st_); }

}  // namespace girafsim
