#pragma once

// Canonical byte encoding used for payload digests, trace snapshot records
// and the opaque weak-set value domain. Integers are big-endian and
// collections are written in a content-sorted order, so structurally equal
// objects encode to identical bytes on every platform.

#include <cstdint>
#include <string>

#include "girafsim/common.hpp"

namespace girafsim {

inline void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_bytes(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out.append(s);
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& data) : data_(data) {}

  std::uint8_t u8() {
    check(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }

  std::uint64_t u64() {
    check(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | static_cast<std::uint8_t>(data_[pos_++]);
    return v;
  }

  std::string bytes() {
    std::uint64_t n = u64();
    check(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

  void expect_done() const {
    if (!done()) throw ConfigError("trailing bytes in canonical record");
  }

 private:
  void check(std::uint64_t n) const {
    if (pos_ + n > data_.size()) throw ConfigError("truncated canonical record");
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace girafsim
