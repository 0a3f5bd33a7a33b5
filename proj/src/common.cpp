#include "girafsim/common.hpp"

#include "girafsim/value.hpp"

namespace girafsim {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw ConfigError("bad hex digit");
}
}  // namespace

std::string to_hex(std::uint64_t v) {
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHexDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string bytes_to_hex(const std::string& bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kHexDigits[c >> 4]);
    out.push_back(kHexDigits[c & 0xf]);
  }
  return out;
}

std::string hex_to_bytes(const std::string& hex) {
  if (hex.size() % 2 != 0) throw ConfigError("odd hex length");
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<char>((hex_nibble(hex[i]) << 4) | hex_nibble(hex[i + 1])));
  }
  return out;
}

std::string value_or_bot_text(const ValueOrBot& v) {
  return v.is_bot ? std::string("bot") : std::to_string(v.value);
}

ValueOrBot parse_value_or_bot(const std::string& text) {
  if (text == "bot") return ValueOrBot::bot();
  try {
    return ValueOrBot::of(std::stoull(text));
  } catch (const std::exception&) {
    throw ConfigError("bad value token: " + text);
  }
}

ValueSet decode_value_set(ByteReader& in) {
  std::uint64_t n = in.u64();
  std::vector<Value> items;
  items.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) items.push_back(in.u64());
  return ValueSet(std::move(items));
}

BotSet decode_bot_set(ByteReader& in) {
  std::uint64_t n = in.u64();
  std::vector<ValueOrBot> items;
  items.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint8_t tag = in.u8();
    if (tag == 0) {
      items.push_back(ValueOrBot::bot());
    } else if (tag == 1) {
      items.push_back(ValueOrBot::of(in.u64()));
    } else {
      throw ConfigError("bad value-or-bot tag");
    }
  }
  return BotSet(std::move(items));
}

WsSet decode_ws_set(ByteReader& in) {
  std::uint64_t n = in.u64();
  std::vector<std::string> items;
  items.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) items.push_back(in.bytes());
  return WsSet(std::move(items));
}

}  // namespace girafsim
