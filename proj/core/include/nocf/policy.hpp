#pragma once

// Policy decision point: masked power-of-two region rules and a fixed-capacity
// rule store that evicts its oldest rule when full.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nocf/bus.hpp"

namespace nocf {

/// Four-bit region size code; code c covers 2^(12+c) bytes (4 KiB .. 128 MiB).
class SizeCode {
 public:
  static constexpr std::uint8_t kMax = 15;
  static constexpr unsigned kMinLog2 = 12;

  constexpr SizeCode() = default;
  explicit SizeCode(unsigned code);

  constexpr std::uint8_t code() const { return code_; }
  constexpr unsigned log2_bytes() const { return kMinLog2 + code_; }

  friend constexpr bool operator==(SizeCode, SizeCode) = default;
  friend constexpr auto operator<=>(SizeCode, SizeCode) = default;

 private:
  std::uint8_t code_ = 0;
};

/// Region size in bytes for a size code.
constexpr std::uint64_t decode_size(SizeCode s) { return std::uint64_t{1} << s.log2_bytes(); }

/// Mask selecting the address bits a rule of this size compares.
constexpr Address region_mask(SizeCode s) {
  return ~static_cast<Address>(decode_size(s) - 1);
}

constexpr bool is_aligned(Address base, SizeCode s) { return (base & ~region_mask(s)) == 0; }

enum class Decision : std::uint8_t { Allow, Deny };

struct PolicyRule {
  Address base = 0;
  SizeCode size;
  bool allow_read = false;
  bool allow_write = false;
  std::uint64_t age = 0;

  bool permits(AccessKind kind) const {
    return kind == AccessKind::Read ? allow_read : allow_write;
  }

  /// Equality ignores age; two rules are the same grant regardless of when
  /// they were inserted.
  bool same_grant(const PolicyRule& o) const {
    return base == o.base && size == o.size && allow_read == o.allow_read &&
           allow_write == o.allow_write;
  }

  friend bool operator==(const PolicyRule&, const PolicyRule&) = default;
};

PolicyRule make_rule(Address base, SizeCode size, bool allow_read, bool allow_write);

bool rule_matches(const PolicyRule& rule, Address addr, AccessKind kind);

class UnalignedRule : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fixed-capacity rule store. Every stored rule is checked on each lookup;
/// insertion past capacity evicts the rule with the smallest age.
class RuleTable {
 public:
  explicit RuleTable(std::size_t capacity = 2);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  std::uint64_t next_age() const { return next_age_; }

  /// Stored rules in insertion (age) order, oldest first.
  const std::vector<PolicyRule>& rules() const { return rules_; }

  Decision decide(Address addr, AccessKind kind) const;
  Decision decide(const AddressRequest& req) const { return decide(req.addr, req.kind); }

  /// Inserts a rule, stamping it with the next age. Throws UnalignedRule when
  /// the base is not aligned to the region size.
  void insert(PolicyRule rule);
  void flush();

  /// Renumbers ages to 0..n-1 keeping their order. FIFO behaviour depends only
  /// on relative age, so the normalized table behaves identically.
  RuleTable normalized() const;

  friend bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  std::size_t capacity_;
  std::vector<PolicyRule> rules_;
  std::uint64_t next_age_ = 0;
};

// Value-returning forms of the table operations.
Decision table_decide(const RuleTable& table, Address addr, AccessKind kind);
RuleTable table_insert(RuleTable table, const PolicyRule& rule);
RuleTable table_flush(RuleTable table);

std::string_view to_string(Decision d);

}  // namespace nocf
