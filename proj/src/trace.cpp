#include "girafsim/trace.hpp"

#include <algorithm>
#include <sstream>

namespace girafsim {

std::string env_kind_name(EnvKind e) {
  switch (e) {
    case EnvKind::MS: return "MS";
    case EnvKind::ES: return "ES";
    case EnvKind::ESS: return "ESS";
  }
  return "?";
}

EnvKind parse_env_kind(const std::string& s) {
  if (s == "MS") return EnvKind::MS;
  if (s == "ES") return EnvKind::ES;
  if (s == "ESS") return EnvKind::ESS;
  throw ConfigError("unknown environment: " + s);
}

std::string mode_name(Mode m) { return m == Mode::Lockstep ? "lockstep" : "skewed"; }

Mode parse_mode(const std::string& s) {
  if (s == "lockstep") return Mode::Lockstep;
  if (s == "skewed") return Mode::Skewed;
  throw ConfigError("unknown mode: " + s);
}

std::string algo_kind_name(AlgoKind a) {
  switch (a) {
    case AlgoKind::ES: return "ES";
    case AlgoKind::ESS: return "ESS";
    case AlgoKind::Weakset: return "WEAKSET";
    case AlgoKind::Emulation: return "EMULATION";
  }
  return "?";
}

AlgoKind parse_algo_kind(const std::string& s) {
  if (s == "ES") return AlgoKind::ES;
  if (s == "ESS") return AlgoKind::ESS;
  if (s == "WEAKSET") return AlgoKind::Weakset;
  if (s == "EMULATION") return AlgoKind::Emulation;
  throw ConfigError("unknown algorithm: " + s);
}

std::optional<Round> Trace::first_decide_round() const {
  std::optional<Round> out;
  for (const auto& e : events) {
    if (e.kind == TraceEventKind::Decide && (!out || e.round < *out)) out = e.round;
  }
  return out;
}

std::vector<const TraceEvent*> Trace::decides() const {
  std::vector<const TraceEvent*> out;
  for (const auto& e : events) {
    if (e.kind == TraceEventKind::Decide) out.push_back(&e);
  }
  return out;
}

void Trace::decode_snapshots(std::shared_ptr<HistoryArena> arena) {
  for (auto& e : events) {
    if (e.kind == TraceEventKind::Snapshot && !e.snap && !e.snap_bytes.empty()) {
      e.snap = decode_snapshot(e.snap_bytes, *arena);
    }
  }
  arena_keepalive = std::move(arena);
}

TraceEvent& TraceRecorder::push(TraceEventKind kind, Label p, Round k) {
  TraceEvent e;
  e.kind = kind;
  e.proc = p;
  e.round = k;
  e.tick = next_tick_++;
  trace_.events.push_back(std::move(e));
  return trace_.events.back();
}

void TraceRecorder::on_end_of_round(Label p, Round entered, std::uint64_t payload_digest) {
  push(TraceEventKind::EndOfRound, p, entered).digest = payload_digest;
}

void TraceRecorder::on_deliver(Label p, Round k, Label from, Round at_round, std::uint64_t digest) {
  auto& e = push(TraceEventKind::Deliver, p, k);
  e.from = from;
  e.at_round = at_round;
  e.digest = digest;
}

void TraceRecorder::on_decide(Label p, Round k, Value v) { push(TraceEventKind::Decide, p, k).value = v; }

void TraceRecorder::on_snapshot(Label p, Round k, SnapPoint point, SnapshotPtr snap) {
  if (!record_snapshots_) return;
  if (point == SnapPoint::End && !record_end_snapshots_) return;
  auto& e = push(TraceEventKind::Snapshot, p, k);
  e.point = point;
  e.snap = std::move(snap);
}

void TraceRecorder::on_crash(Label p, Round k) { push(TraceEventKind::Crash, p, k); }

void TraceRecorder::add_start(Label p, std::uint32_t op, OpTag tag, const std::string& item) {
  auto& e = push(TraceEventKind::AddStart, p, 0);
  e.op = op;
  e.tag = tag;
  e.op_value = item;
}

void TraceRecorder::add_end(Label p, std::uint32_t op, OpTag tag, const std::string& item) {
  auto& e = push(TraceEventKind::AddEnd, p, 0);
  e.op = op;
  e.tag = tag;
  e.op_value = item;
}

void TraceRecorder::get(Label p, std::uint32_t op, OpTag tag, std::vector<std::string> result) {
  auto& e = push(TraceEventKind::Get, p, 0);
  e.op = op;
  e.tag = tag;
  e.op_result = std::move(result);
}

namespace {

constexpr const char* kHeader = "#girafsim-trace v1";

std::string op_tag_name(OpTag t) {
  switch (t) {
    case OpTag::Plain: return "plain";
    case OpTag::RegSnap: return "wsnap";
    case OpTag::RegRead: return "read";
  }
  return "?";
}

OpTag parse_op_tag(const std::string& s) {
  if (s == "plain") return OpTag::Plain;
  if (s == "wsnap") return OpTag::RegSnap;
  if (s == "read") return OpTag::RegRead;
  throw ConfigError("unknown op tag: " + s);
}

std::string join_values(const std::vector<Value>& vs) {
  if (vs.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(vs[i]);
  }
  return out;
}

std::vector<Value> split_values(const std::string& s) {
  std::vector<Value> out;
  if (s == "-") return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty()) throw ConfigError("empty value token");
    out.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// key=value field scanner for one line
class Fields {
 public:
  explicit Fields(const std::string& line) {
    std::istringstream in(line);
    std::string tok;
    in >> kind_;
    while (in >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) throw ConfigError("bad field: " + tok);
      fields_.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
  }

  const std::string& kind() const { return kind_; }

  const std::string& str(const std::string& key) const {
    for (const auto& [k, v] : fields_) {
      if (k == key) return v;
    }
    throw ConfigError("missing field " + key + " in " + kind_ + " record");
  }

  std::uint64_t num(const std::string& key) const {
    const std::string& v = str(key);
    try {
      return std::stoull(v);
    } catch (const std::exception&) {
      throw ConfigError("bad number for " + key + ": " + v);
    }
  }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : fields_) {
      if (k == key) return true;
    }
    return false;
  }

 private:
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace

std::string serialize_trace(const Trace& t) {
  std::ostringstream out;
  out << kHeader << "\n";
  const TraceMeta& m = t.meta;
  out << "meta algo=" << algo_kind_name(m.algo) << " env=" << env_kind_name(m.env)
      << " mode=" << mode_name(m.mode) << " n=" << m.n << " seed=" << m.seed
      << " horizon=" << m.horizon << " kstab=" << m.kstab
      << " source=" << (m.stable_source ? std::to_string(*m.stable_source) : "-")
      << " dmax=" << m.dmax << " values=" << join_values(m.values)
      << " emulated=" << (m.emulated ? 1 : 0) << "\n";

  for (const TraceEvent& e : t.events) {
    switch (e.kind) {
      case TraceEventKind::EndOfRound:
        out << "eor p=" << e.proc << " k=" << e.round << " d=" << to_hex(e.digest) << " t=" << e.tick << "\n";
        break;
      case TraceEventKind::Deliver:
        out << "deliver p=" << e.proc << " k=" << e.round
            << " from=" << (e.from == kNoLabel ? std::string("-") : std::to_string(e.from))
            << " r=" << e.at_round << " d=" << to_hex(e.digest) << " t=" << e.tick << "\n";
        break;
      case TraceEventKind::Decide:
        out << "decide p=" << e.proc << " k=" << e.round << " v=" << e.value << " t=" << e.tick << "\n";
        break;
      case TraceEventKind::Crash:
        out << "crash p=" << e.proc << " k=" << e.round << " t=" << e.tick << "\n";
        break;
      case TraceEventKind::Snapshot: {
        const std::string bytes = e.snap ? encode_snapshot(*e.snap) : e.snap_bytes;
        out << "snap p=" << e.proc << " k=" << e.round << " pt=" << (e.point == SnapPoint::Mid ? "mid" : "end")
            << " s=" << bytes_to_hex(bytes) << " t=" << e.tick << "\n";
        break;
      }
      case TraceEventKind::AddStart:
      case TraceEventKind::AddEnd:
        out << (e.kind == TraceEventKind::AddStart ? "addst" : "adden") << " p=" << e.proc << " op=" << e.op
            << " tag=" << op_tag_name(e.tag) << " v=" << bytes_to_hex(e.op_value) << " t=" << e.tick << "\n";
        break;
      case TraceEventKind::Get: {
        out << "get p=" << e.proc << " op=" << e.op << " tag=" << op_tag_name(e.tag) << " vs=";
        if (e.op_result.empty()) {
          out << "-";
        } else {
          for (std::size_t i = 0; i < e.op_result.size(); ++i) {
            if (i) out << ",";
            out << bytes_to_hex(e.op_result[i]);
          }
        }
        out << " t=" << e.tick << "\n";
        break;
      }
    }
  }
  return out.str();
}

Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ConfigError("bad trace header");

  Trace t;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Fields f(line);
    const std::string& kind = f.kind();
    if (kind == "meta") {
      TraceMeta m;
      m.algo = parse_algo_kind(f.str("algo"));
      m.env = parse_env_kind(f.str("env"));
      m.mode = parse_mode(f.str("mode"));
      m.n = static_cast<std::uint32_t>(f.num("n"));
      m.seed = f.num("seed");
      m.horizon = static_cast<Round>(f.num("horizon"));
      m.kstab = static_cast<Round>(f.num("kstab"));
      if (f.str("source") != "-") m.stable_source = static_cast<Label>(f.num("source"));
      m.dmax = static_cast<std::uint32_t>(f.num("dmax"));
      m.values = split_values(f.str("values"));
      m.emulated = f.num("emulated") != 0;
      t.meta = std::move(m);
      have_meta = true;
      continue;
    }

    TraceEvent e;
    e.proc = static_cast<Label>(f.num("p"));
    e.tick = f.num("t");
    if (kind == "eor") {
      e.kind = TraceEventKind::EndOfRound;
      e.round = static_cast<Round>(f.num("k"));
      e.digest = std::stoull(f.str("d"), nullptr, 16);
    } else if (kind == "deliver") {
      e.kind = TraceEventKind::Deliver;
      e.round = static_cast<Round>(f.num("k"));
      e.from = f.str("from") == "-" ? kNoLabel : static_cast<Label>(f.num("from"));
      e.at_round = static_cast<Round>(f.num("r"));
      e.digest = std::stoull(f.str("d"), nullptr, 16);
    } else if (kind == "decide") {
      e.kind = TraceEventKind::Decide;
      e.round = static_cast<Round>(f.num("k"));
      e.value = f.num("v");
    } else if (kind == "crash") {
      e.kind = TraceEventKind::Crash;
      e.round = static_cast<Round>(f.num("k"));
    } else if (kind == "snap") {
      e.kind = TraceEventKind::Snapshot;
      e.round = static_cast<Round>(f.num("k"));
      e.point = f.str("pt") == "mid" ? SnapPoint::Mid : SnapPoint::End;
      e.snap_bytes = hex_to_bytes(f.str("s"));
    } else if (kind == "addst" || kind == "adden") {
      e.kind = kind == "addst" ? TraceEventKind::AddStart : TraceEventKind::AddEnd;
      e.op = static_cast<std::uint32_t>(f.num("op"));
      e.tag = parse_op_tag(f.str("tag"));
      e.op_value = hex_to_bytes(f.str("v"));
    } else if (kind == "get") {
      e.kind = TraceEventKind::Get;
      e.op = static_cast<std::uint32_t>(f.num("op"));
      e.tag = parse_op_tag(f.str("tag"));
      const std::string& vs = f.str("vs");
      if (vs != "-") {
        std::size_t pos = 0;
        while (pos <= vs.size()) {
          std::size_t comma = vs.find(',', pos);
          e.op_result.push_back(hex_to_bytes(vs.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
      }
    } else {
      throw ConfigError("unknown trace record: " + kind);
    }
    t.events.push_back(std::move(e));
  }
  if (!have_meta) throw ConfigError("trace has no meta record");
  return t;
}

}  // namespace girafsim
