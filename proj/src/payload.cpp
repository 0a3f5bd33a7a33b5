#include "girafsim/payload.hpp"

namespace girafsim {

namespace {

constexpr std::uint8_t kTagValueSet = 1;
constexpr std::uint8_t kTagWsSet = 2;
constexpr std::uint8_t kTagEssMessage = 3;

std::uint64_t hash_value_set(const ValueSet& s) {
  std::uint64_t h = fnv1a_u64(fnv1a_init(), kTagValueSet);
  h = fnv1a_u64(h, s.size());
  for (Value v : s) h = fnv1a_u64(h, v);
  return h;
}

std::uint64_t hash_ws_set(const WsSet& s) {
  std::uint64_t h = fnv1a_u64(fnv1a_init(), kTagWsSet);
  h = fnv1a_u64(h, s.size());
  for (const std::string& v : s) h = fnv1a_bytes(h, v);
  return h;
}

std::uint64_t hash_ess_message(const EssMessage& m) {
  std::uint64_t h = fnv1a_u64(fnv1a_init(), kTagEssMessage);
  h = fnv1a_u64(h, m.proposed.size());
  for (const ValueOrBot& v : m.proposed) {
    h = fnv1a_u64(h, v.is_bot ? 0 : 1);
    if (!v.is_bot) h = fnv1a_u64(h, v.value);
  }
  h = fnv1a_u64(h, m.history ? m.history->hash : 0);
  h = fnv1a_u64(h, m.counter_map().content_hash());
  return h;
}

std::uint64_t hash_body(const Payload::Body& body) {
  if (const auto* vs = std::get_if<ValueSet>(&body)) return hash_value_set(*vs);
  if (const auto* ws = std::get_if<WsSet>(&body)) return hash_ws_set(*ws);
  return hash_ess_message(std::get<EssMessage>(body));
}

}  // namespace

bool operator==(const EssMessage& a, const EssMessage& b) {
  return a.history == b.history && a.proposed == b.proposed && a.counter_map() == b.counter_map();
}

Payload::Payload(Body b) : body(std::move(b)), digest(hash_body(body)) {}

const ValueSet& Payload::value_set() const {
  const auto* s = std::get_if<ValueSet>(&body);
  require(s != nullptr, "payload is not a value set");
  return *s;
}

const WsSet& Payload::ws_set() const {
  const auto* s = std::get_if<WsSet>(&body);
  require(s != nullptr, "payload is not a weak-set item set");
  return *s;
}

const EssMessage& Payload::ess_message() const {
  const auto* m = std::get_if<EssMessage>(&body);
  require(m != nullptr, "payload is not an ESS message");
  return *m;
}

PayloadPtr make_payload(ValueSet s) { return std::make_shared<const Payload>(Payload::Body(std::move(s))); }
PayloadPtr make_payload(WsSet s) { return std::make_shared<const Payload>(Payload::Body(std::move(s))); }
PayloadPtr make_payload(EssMessage m) { return std::make_shared<const Payload>(Payload::Body(std::move(m))); }

bool payload_equal(const Payload& a, const Payload& b) {
  if (a.digest != b.digest) return false;
  if (a.body.index() != b.body.index()) return false;
  return a.body == b.body;
}

std::string encode_payload(const Payload& p) {
  std::string out;
  if (const auto* vs = std::get_if<ValueSet>(&p.body)) {
    put_u8(out, kTagValueSet);
    encode_value_set(out, *vs);
  } else if (const auto* ws = std::get_if<WsSet>(&p.body)) {
    put_u8(out, kTagWsSet);
    encode_ws_set(out, *ws);
  } else {
    const auto& m = std::get<EssMessage>(p.body);
    put_u8(out, kTagEssMessage);
    encode_bot_set(out, m.proposed);
    encode_history(out, m.history);
    encode_counter_map(out, m.counter_map());
  }
  return out;
}

PayloadPtr decode_payload(const std::string& bytes, HistoryArena& arena) {
  ByteReader in(bytes);
  std::uint8_t tag = in.u8();
  PayloadPtr out;
  switch (tag) {
    case kTagValueSet:
      out = make_payload(decode_value_set(in));
      break;
    case kTagWsSet:
      out = make_payload(decode_ws_set(in));
      break;
    case kTagEssMessage: {
      EssMessage m;
      m.proposed = decode_bot_set(in);
      m.history = decode_history(in, arena);
      m.counters = std::make_shared<const CounterMap>(decode_counter_map(in, arena));
      out = make_payload(std::move(m));
      break;
    }
    default:
      throw ConfigError("bad payload tag");
  }
  in.expect_done();
  return out;
}

}  // namespace girafsim
