#pragma once

// Reference models written without using the code under test. Each one takes
// the most literal route available so a shared bug is unlikely.

#include <bitset>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace oracle {

struct Range {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // exclusive
  bool r = false;
  bool w = false;
};

/// Allow iff any stored range contains the address with the needed permission.
inline bool linear_scan_allows(const std::vector<Range>& ranges, std::uint32_t addr, bool is_read) {
  for (const auto& g : ranges) {
    if (addr >= g.lo && addr < g.hi && (is_read ? g.r : g.w)) return true;
  }
  return false;
}

inline Range range_of(std::uint32_t base, unsigned size_code, bool r, bool w) {
  std::uint64_t bytes = 4096;
  for (unsigned i = 0; i < size_code; ++i) bytes *= 2;
  return Range{base, base + bytes, r, w};
}

/// Queue that forgets its oldest element when a push would overflow it.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t cap) : cap_(cap) {}
  void push(const T& v) {
    if (q_.size() == cap_) q_.pop_front();
    q_.push_back(v);
  }
  void clear() { q_.clear(); }
  const std::deque<T>& items() const { return q_; }

 private:
  std::size_t cap_;
  std::deque<T> q_;
};

/// Builds a word from a most-significant-first string of '0'/'1' fields.
inline std::uint32_t assemble(const std::string& bits) {
  std::string clean;
  for (char c : bits) {
    if (c == '0' || c == '1') clean.push_back(c);
  }
  return static_cast<std::uint32_t>(std::bitset<32>(clean).to_ulong());
}

inline std::string field(std::uint32_t v, unsigned width) {
  std::string s;
  for (unsigned i = width; i-- > 0;) s.push_back(((v >> i) & 1u) ? '1' : '0');
  return s;
}

/// Command word: opcode, then for NewRule the size/perm/page fields.
inline std::uint32_t new_rule_word(std::uint32_t page, unsigned size_code, bool r, bool w) {
  return assemble("00" + field(size_code, 4) + (r ? "1" : "0") + (w ? "1" : "0") +
                  field(page, 20) + "0000");
}
inline std::uint32_t bare_word(unsigned opcode) {
  return assemble(field(opcode, 2) + std::string(30, '0'));
}
inline std::uint32_t intr_word(std::uint32_t addr, bool is_read) {
  return assemble(field(addr >> 12, 20) + std::string(11, '0') + (is_read ? "1" : "0"));
}

}  // namespace oracle
