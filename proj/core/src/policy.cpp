#include "nocf/policy.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace nocf {

SizeCode::SizeCode(unsigned code) {
  if (code > kMax) {
    throw std::invalid_argument("size code out of range: " + std::to_string(code));
  }
  code_ = static_cast<std::uint8_t>(code);
}

PolicyRule make_rule(Address base, SizeCode size, bool allow_read, bool allow_write) {
  if (!is_aligned(base, size)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "rule base 0x%08X not aligned to %llu bytes", base,
                  static_cast<unsigned long long>(decode_size(size)));
    throw UnalignedRule(buf);
  }
  return PolicyRule{base, size, allow_read, allow_write, 0};
}

bool rule_matches(const PolicyRule& rule, Address addr, AccessKind kind) {
  return (addr & region_mask(rule.size)) == rule.base && rule.permits(kind);
}

RuleTable::RuleTable(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("rule table capacity must be positive");
  rules_.reserve(capacity_);
}

Decision RuleTable::decide(Address addr, AccessKind kind) const {
  const bool any = std::any_of(rules_.begin(), rules_.end(), [&](const PolicyRule& r) {
    return rule_matches(r, addr, kind);
  });
  return any ? Decision::Allow : Decision::Deny;
}

void RuleTable::insert(PolicyRule rule) {
  if (!is_aligned(rule.base, rule.size)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "rule base 0x%08X not aligned to size code %u", rule.base,
                  unsigned{rule.size.code()});
    throw UnalignedRule(buf);
  }
  if (rules_.size() == capacity_) {
    // rules_ is kept in age order, so the front is the minimum age.
    rules_.erase(rules_.begin());
  }
  rule.age = next_age_++;
  rules_.push_back(rule);
}

void RuleTable::flush() { rules_.clear(); }

RuleTable RuleTable::normalized() const {
  RuleTable t = *this;
  std::uint64_t age = 0;
  for (auto& r : t.rules_) r.age = age++;
  t.next_age_ = age;
  return t;
}

Decision table_decide(const RuleTable& table, Address addr, AccessKind kind) {
  return table.decide(addr, kind);
}

RuleTable table_insert(RuleTable table, const PolicyRule& rule) {
  table.insert(rule);
  return table;
}

RuleTable table_flush(RuleTable table) {
  table.flush();
  return table;
}

std::string_view to_string(Decision d) { return d == Decision::Allow ? "allow" : "deny"; }

}  // namespace nocf
