#pragma once

// Round messages. Anonymity makes payload identity purely structural: two
// processes that broadcast equal content produce THE SAME element of a
// recipient's per-round message set. Payloads are immutable and shared;
// equality goes through a memoized content hash first, then a deep compare.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "girafsim/history.hpp"
#include "girafsim/value.hpp"

namespace girafsim {

/// Message body of the stable-source consensus automaton.
struct EssMessage {
  BotSet proposed;
  HistoryRef history = nullptr;
  std::shared_ptr<const CounterMap> counters;

  const CounterMap& counter_map() const {
    static const CounterMap kEmpty;
    return counters ? *counters : kEmpty;
  }
};

bool operator==(const EssMessage& a, const EssMessage& b);

struct Payload {
  using Body = std::variant<ValueSet, WsSet, EssMessage>;

  explicit Payload(Body body);

  Body body;
  std::uint64_t digest;  // 64-bit content digest; doubles as the trace digest

  const ValueSet& value_set() const;
  const WsSet& ws_set() const;
  const EssMessage& ess_message() const;
};

using PayloadPtr = std::shared_ptr<const Payload>;

PayloadPtr make_payload(ValueSet s);
PayloadPtr make_payload(WsSet s);
PayloadPtr make_payload(EssMessage m);

bool payload_equal(const Payload& a, const Payload& b);

/// Canonical bytes. Only needed when payloads cross a byte boundary (weak-set
/// items carrying emulated bundles); digests and trace records never require
/// a full encode.
std::string encode_payload(const Payload& p);
PayloadPtr decode_payload(const std::string& bytes, HistoryArena& arena);

}  // namespace girafsim
