#include "girafsim/automaton.hpp"

namespace girafsim {

namespace {
constexpr std::uint8_t kSnapEs = 1;
constexpr std::uint8_t kSnapEss = 2;
constexpr std::uint8_t kSnapWs = 3;
}  // namespace

std::string encode_snapshot(const Snapshot& s) {
  std::string out;
  if (const auto* es = std::get_if<EsSnapshot>(&s)) {
    put_u8(out, kSnapEs);
    put_u64(out, es->val);
    encode_value_set(out, es->written);
    encode_value_set(out, es->written_old);
    encode_value_set(out, es->proposed);
  } else if (const auto* ess = std::get_if<EssSnapshot>(&s)) {
    put_u8(out, kSnapEss);
    put_u64(out, ess->val);
    encode_bot_set(out, ess->written);
    encode_bot_set(out, ess->written_old);
    encode_bot_set(out, ess->proposed);
    encode_history(out, ess->history);
    static const CounterMap kEmpty;
    encode_counter_map(out, ess->counters ? *ess->counters : kEmpty);
  } else {
    const auto& ws = std::get<WsSnapshot>(s);
    put_u8(out, kSnapWs);
    put_u8(out, ws.val.has_value() ? 1 : 0);
    if (ws.val.has_value()) put_bytes(out, *ws.val);
    encode_ws_set(out, ws.proposed);
    encode_ws_set(out, ws.written);
    put_u8(out, ws.block ? 1 : 0);
  }
  return out;
}

SnapshotPtr decode_snapshot(const std::string& bytes, HistoryArena& arena) {
  ByteReader in(bytes);
  std::uint8_t tag = in.u8();
  Snapshot snap;
  switch (tag) {
    case kSnapEs: {
      EsSnapshot es;
      es.val = in.u64();
      es.written = decode_value_set(in);
      es.written_old = decode_value_set(in);
      es.proposed = decode_value_set(in);
      snap = std::move(es);
      break;
    }
    case kSnapEss: {
      EssSnapshot ess;
      ess.val = in.u64();
      ess.written = decode_bot_set(in);
      ess.written_old = decode_bot_set(in);
      ess.proposed = decode_bot_set(in);
      ess.history = decode_history(in, arena);
      ess.counters = std::make_shared<const CounterMap>(decode_counter_map(in, arena));
      snap = std::move(ess);
      break;
    }
    case kSnapWs: {
      WsSnapshot ws;
      if (in.u8() != 0) ws.val = in.bytes();
      ws.proposed = decode_ws_set(in);
      ws.written = decode_ws_set(in);
      ws.block = in.u8() != 0;
      snap = std::move(ws);
      break;
    }
    default:
      throw ConfigError("bad snapshot tag");
  }
  in.expect_done();
  return std::make_shared<const Snapshot>(std::move(snap));
}

}  // namespace girafsim
