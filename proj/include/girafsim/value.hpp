#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "girafsim/codec.hpp"
#include "girafsim/common.hpp"

namespace girafsim {

/// A proposal value or the distinguished bottom sentinel. Bottom sorts
/// before every real value.
struct ValueOrBot {
  bool is_bot = true;
  Value value = 0;

  static ValueOrBot bot() { return ValueOrBot{}; }
  static ValueOrBot of(Value v) { return ValueOrBot{false, v}; }

  friend auto operator<=>(const ValueOrBot& a, const ValueOrBot& b) {
    if (a.is_bot != b.is_bot) return a.is_bot ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_bot) return std::strong_ordering::equal;
    return a.value <=> b.value;
  }
  friend bool operator==(const ValueOrBot&, const ValueOrBot&) = default;
};

std::string value_or_bot_text(const ValueOrBot& v);
ValueOrBot parse_value_or_bot(const std::string& text);

// Sorted-unique vectors double as value sets; set operations stay
// deterministic and cheap at the sizes the simulator sees.

template <typename T>
class SortedSet {
 public:
  SortedSet() = default;
  explicit SortedSet(std::vector<T> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }

  bool insert(const T& v) {
    auto it = std::lower_bound(items_.begin(), items_.end(), v);
    if (it != items_.end() && *it == v) return false;
    items_.insert(it, v);
    return true;
  }

  bool contains(const T& v) const {
    return std::binary_search(items_.begin(), items_.end(), v);
  }

  void merge(const SortedSet& other) {
    for (const T& v : other.items_) insert(v);
  }

  bool subset_of(const SortedSet& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
  }

  static SortedSet intersection(const SortedSet& a, const SortedSet& b) {
    SortedSet out;
    std::set_intersection(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(),
                          std::back_inserter(out.items_));
    return out;
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::vector<T>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const T& max() const {
    require(!items_.empty(), "max of empty set");
    return items_.back();
  }

  friend bool operator==(const SortedSet&, const SortedSet&) = default;

 private:
  std::vector<T> items_;
};

using ValueSet = SortedSet<Value>;      // plain value sets (ES consensus payloads)
using BotSet = SortedSet<ValueOrBot>;   // value-or-bottom sets (ESS consensus)
using WsSet = SortedSet<std::string>;   // opaque weak-set items, canonical bytes

inline BotSet lift_to_bot_set(const ValueSet& vs) {
  BotSet out;
  for (Value v : vs) out.insert(ValueOrBot::of(v));
  return out;
}

inline void encode_value_set(std::string& out, const ValueSet& s) {
  put_u64(out, s.size());
  for (Value v : s) put_u64(out, v);
}

inline void encode_bot_set(std::string& out, const BotSet& s) {
  put_u64(out, s.size());
  for (const ValueOrBot& v : s) {
    put_u8(out, v.is_bot ? 0 : 1);
    if (!v.is_bot) put_u64(out, v.value);
  }
}

inline void encode_ws_set(std::string& out, const WsSet& s) {
  put_u64(out, s.size());
  for (const std::string& v : s) put_bytes(out, v);
}

ValueSet decode_value_set(ByteReader& in);
BotSet decode_bot_set(ByteReader& in);
WsSet decode_ws_set(ByteReader& in);

}  // namespace girafsim
