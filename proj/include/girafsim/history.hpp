#pragma once

// Proposal-value histories act as pseudo-identities: an anonymous process is
// told apart from its peers only by the sequence of values it has proposed.
// Histories are hash-consed per simulation run, so appending is O(1) and two
// equal histories are the same node. Node ids are assigned in creation order,
// which is deterministic for a fixed seed; they order counter-map entries
// cheaply, while serialization re-sorts by content so equal maps are
// byte-equal regardless of id assignment.

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "girafsim/codec.hpp"
#include "girafsim/common.hpp"

namespace girafsim {

struct HistoryNode;
using HistoryRef = const HistoryNode*;

struct HistoryNode {
  HistoryRef parent;  // nullptr for length-1 histories
  Value value;        // last appended value
  std::uint32_t length;
  std::uint32_t id;
  std::uint64_t hash;
};

class HistoryArena {
 public:
  HistoryArena() = default;
  HistoryArena(const HistoryArena&) = delete;
  HistoryArena& operator=(const HistoryArena&) = delete;

  /// History consisting of a single initial value.
  HistoryRef root(Value v) { return intern(nullptr, v); }

  HistoryRef append(HistoryRef h, Value v) {
    require(h != nullptr, "append to null history");
    return intern(h, v);
  }

  /// Rebuild a history from its value sequence (trace decoding).
  HistoryRef from_values(const std::vector<Value>& values);

  std::size_t size() const { return nodes_.size(); }

 private:
  HistoryRef intern(HistoryRef parent, Value v);

  struct KeyHash {
    std::size_t operator()(const std::pair<HistoryRef, Value>& k) const {
      std::uint64_t h = fnv1a_u64(fnv1a_init(), reinterpret_cast<std::uintptr_t>(k.first));
      return static_cast<std::size_t>(fnv1a_u64(h, k.second));
    }
  };

  std::vector<std::unique_ptr<HistoryNode>> nodes_;
  std::unordered_map<std::pair<HistoryRef, Value>, HistoryRef, KeyHash> index_;
};

/// True iff a equals the first |a| values of b. Reflexive.
bool is_prefix(HistoryRef a, HistoryRef b);

/// Lexicographic content order (shorter prefix first). Used only where byte
/// stability across differently-built arenas matters, i.e. serialization.
int history_content_compare(HistoryRef a, HistoryRef b);

std::vector<Value> history_values(HistoryRef h);
void encode_history(std::string& out, HistoryRef h);
HistoryRef decode_history(ByteReader& in, HistoryArena& arena);
std::string history_text(HistoryRef h);  // "[3,5,5]" for diagnostics

/// History -> counter map with absent keys reading as zero. Entries are kept
/// sorted by node id; only histories actually heard of get entries.
class CounterMap {
 public:
  std::uint64_t get(HistoryRef h) const;
  void set(HistoryRef h, std::uint64_t v);
  bool has(HistoryRef h) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<HistoryRef, std::uint64_t>>& entries() const { return entries_; }

  std::uint64_t content_hash() const;
  friend bool operator==(const CounterMap&, const CounterMap&) = default;

 private:
  std::vector<std::pair<HistoryRef, std::uint64_t>> entries_;
};

void encode_counter_map(std::string& out, const CounterMap& c);
CounterMap decode_counter_map(ByteReader& in, HistoryArena& arena);

}  // namespace girafsim
