#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace girafsim {

using Value = std::uint64_t;   // proposal values: totally ordered ordinals
using Label = std::uint32_t;   // simulator-internal process label (never visible to automata)
using Round = std::uint32_t;
using Tick = std::uint64_t;

inline constexpr Label kNoLabel = 0xffffffffu;

/// Thrown on misuse of the harness itself (stepping a crashed process,
/// double-booting an emulated process, ...). Distinct from config errors.
class HarnessBug : public std::logic_error {
 public:
  explicit HarnessBug(const std::string& what) : std::logic_error(what) {}
};

/// Thrown on malformed scenario/trace/schedule input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* what) {
  if (!cond) throw HarnessBug(what);
}

// FNV-1a, fixed 64-bit arithmetic so digests are identical across platforms.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a_init() { return kFnvOffset; }

inline std::uint64_t fnv1a_byte(std::uint64_t h, std::uint8_t b) {
  return (h ^ b) * kFnvPrime;
}

inline std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) h = fnv1a_byte(h, static_cast<std::uint8_t>(v >> (8 * i)));
  return h;
}

inline std::uint64_t fnv1a_bytes(std::uint64_t h, const std::string& s) {
  h = fnv1a_u64(h, s.size());
  for (unsigned char c : s) h = fnv1a_byte(h, c);
  return h;
}

/// Seed mixer for deriving independent per-run seeds (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic RNG: a splitmix64 stream with explicit bounded-draw
/// helpers. Fixed 64-bit arithmetic end to end, so sequences are identical
/// on every platform (std::uniform_int_distribution would not be).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // scramble a couple of times so nearby seeds diverge quickly
    next();
    next();
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform-ish integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    require(n > 0, "Rng::below(0)");
    return next() % n;
  }

  std::uint32_t below32(std::uint32_t n) { return static_cast<std::uint32_t>(below(n)); }

  /// True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

 private:
  std::uint64_t state_;
};

std::string to_hex(std::uint64_t v);
std::string bytes_to_hex(const std::string& bytes);
std::string hex_to_bytes(const std::string& hex);  // throws ConfigError on bad input

}  // namespace girafsim
