#include "girafsim/history.hpp"

#include <algorithm>

namespace girafsim {

HistoryRef HistoryArena::intern(HistoryRef parent, Value v) {
  auto key = std::make_pair(parent, v);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;

  auto node = std::make_unique<HistoryNode>();
  node->parent = parent;
  node->value = v;
  node->length = parent ? parent->length + 1 : 1;
  node->id = static_cast<std::uint32_t>(nodes_.size());
  std::uint64_t h = parent ? parent->hash : fnv1a_init();
  node->hash = fnv1a_u64(h, v);

  HistoryRef ref = node.get();
  nodes_.push_back(std::move(node));
  index_.emplace(key, ref);
  return ref;
}

HistoryRef HistoryArena::from_values(const std::vector<Value>& values) {
  require(!values.empty(), "history must be non-empty");
  HistoryRef h = root(values[0]);
  for (std::size_t i = 1; i < values.size(); ++i) h = append(h, values[i]);
  return h;
}

bool is_prefix(HistoryRef a, HistoryRef b) {
  if (a == nullptr || b == nullptr) return false;
  if (a->length > b->length) return false;
  while (b->length > a->length) b = b->parent;
  return a == b;
}

std::vector<Value> history_values(HistoryRef h) {
  std::vector<Value> out;
  for (HistoryRef n = h; n != nullptr; n = n->parent) out.push_back(n->value);
  std::reverse(out.begin(), out.end());
  return out;
}

int history_content_compare(HistoryRef a, HistoryRef b) {
  if (a == b) return 0;
  std::vector<Value> va = history_values(a);
  std::vector<Value> vb = history_values(b);
  if (va < vb) return -1;
  if (vb < va) return 1;
  return 0;
}

void encode_history(std::string& out, HistoryRef h) {
  std::vector<Value> vals = history_values(h);
  put_u64(out, vals.size());
  for (Value v : vals) put_u64(out, v);
}

HistoryRef decode_history(ByteReader& in, HistoryArena& arena) {
  std::uint64_t n = in.u64();
  if (n == 0) throw ConfigError("empty history in record");
  std::vector<Value> vals;
  vals.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) vals.push_back(in.u64());
  return arena.from_values(vals);
}

std::string history_text(HistoryRef h) {
  std::string out = "[";
  bool first = true;
  for (Value v : history_values(h)) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  out += "]";
  return out;
}

std::uint64_t CounterMap::get(HistoryRef h) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                             [](const auto& e, HistoryRef k) { return e.first->id < k->id; });
  if (it != entries_.end() && it->first == h) return it->second;
  return 0;
}

bool CounterMap::has(HistoryRef h) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                             [](const auto& e, HistoryRef k) { return e.first->id < k->id; });
  return it != entries_.end() && it->first == h;
}

void CounterMap::set(HistoryRef h, std::uint64_t v) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                             [](const auto& e, HistoryRef k) { return e.first->id < k->id; });
  if (it != entries_.end() && it->first == h) {
    it->second = v;
  } else {
    entries_.insert(it, {h, v});
  }
}

std::uint64_t CounterMap::content_hash() const {
  // commutative combine: the hash depends only on content, not on the order
  // ids happened to be assigned in
  std::uint64_t h = fnv1a_u64(fnv1a_init(), entries_.size());
  std::uint64_t acc = 0;
  for (const auto& [hist, cnt] : entries_) {
    acc += fnv1a_u64(fnv1a_u64(fnv1a_init(), hist->hash), cnt);
  }
  return fnv1a_u64(h, acc);
}

void encode_counter_map(std::string& out, const CounterMap& c) {
  std::vector<std::pair<HistoryRef, std::uint64_t>> sorted(c.entries());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return history_content_compare(a.first, b.first) < 0;
  });
  put_u64(out, sorted.size());
  for (const auto& [hist, cnt] : sorted) {
    encode_history(out, hist);
    put_u64(out, cnt);
  }
}

CounterMap decode_counter_map(ByteReader& in, HistoryArena& arena) {
  std::uint64_t n = in.u64();
  CounterMap out;
  for (std::uint64_t i = 0; i < n; ++i) {
    HistoryRef h = decode_history(in, arena);
    out.set(h, in.u64());
  }
  return out;
}

}  // namespace girafsim
