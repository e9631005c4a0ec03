#include <gtest/gtest.h>

#include <random>

#include "nocf/policy.hpp"
#include "oracles.hpp"

namespace nocf {
namespace {

TEST(SizeCode, DecodesPowersOfTwo) {
  EXPECT_EQ(decode_size(SizeCode(0)), 4096u);
  EXPECT_EQ(decode_size(SizeCode(8)), 1u << 20);
  EXPECT_EQ(decode_size(SizeCode(15)), 128u << 20);
  EXPECT_THROW(SizeCode(16), std::invalid_argument);
}

TEST(Rule, MatchIsMaskedCompareWithPermission) {
  const auto r = make_rule(0x80000000, SizeCode(8), true, false);
  EXPECT_TRUE(rule_matches(r, 0x800FFFFF, AccessKind::Read));
  EXPECT_FALSE(rule_matches(r, 0x80100000, AccessKind::Read));
  EXPECT_FALSE(rule_matches(r, 0x80000000, AccessKind::Write));
}

TEST(RuleTable, EmptyTableDenies) {
  RuleTable t(2);
  EXPECT_EQ(t.decide(0x80000000, AccessKind::Read), Decision::Deny);
}

TEST(RuleTable, UnalignedInsertThrows) {
  RuleTable t(2);
  EXPECT_THROW(t.insert(make_rule(0x80000800, SizeCode(0), true, true)), UnalignedRule);
  EXPECT_TRUE(t.empty());
}

TEST(RuleTable, EvictsOldestWhenFull) {
  RuleTable t(2);
  t.insert(make_rule(0x1000, SizeCode(0), true, true));
  t.insert(make_rule(0x2000, SizeCode(0), true, true));
  t.insert(make_rule(0x3000, SizeCode(0), true, true));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.rules()[0].base, 0x2000u);
  EXPECT_EQ(t.rules()[1].base, 0x3000u);
  EXPECT_EQ(t.decide(0x1000, AccessKind::Read), Decision::Deny);
}

TEST(RuleTable, FlushClearsAndKeepsAgeCounter) {
  RuleTable t(2);
  t.insert(make_rule(0x1000, SizeCode(0), true, true));
  t.flush();
  EXPECT_TRUE(t.empty());
  EXPECT_EQ(t.next_age(), 1u);
}

TEST(RuleTable, NormalizedBehavesTheSame) {
  RuleTable t(2);
  for (Address a = 0x1000; a <= 0x5000; a += 0x1000) t.insert(make_rule(a, SizeCode(0), true, true));
  const RuleTable n = t.normalized();
  EXPECT_EQ(n.rules()[0].age, 0u);
  EXPECT_EQ(n.rules()[1].age, 1u);
  RuleTable a = t, b = n;
  a.insert(make_rule(0x9000, SizeCode(0), true, false));
  b.insert(make_rule(0x9000, SizeCode(0), true, false));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a.rules()[i].same_grant(b.rules()[i]));
}

TEST(RuleTable, RandomTablesAgreeWithLinearScan) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    RuleTable t(4);
    oracle::BoundedQueue<oracle::Range> model(4);
    for (int k = 0; k < 6; ++k) {
      const unsigned code = rng() % 16;
      const Address base = static_cast<Address>(rng()) & region_mask(SizeCode(code));
      const bool r = rng() & 1, w = rng() & 1;
      t.insert(make_rule(base, SizeCode(code), r, w));
      model.push(oracle::range_of(base, code, r, w));
    }
    const std::vector<oracle::Range> ranges(model.items().begin(), model.items().end());
    for (int q = 0; q < 200; ++q) {
      const Address a = static_cast<Address>(rng());
      const bool rd = rng() & 1;
      EXPECT_EQ(t.decide(a, rd ? AccessKind::Read : AccessKind::Write) == Decision::Allow,
                oracle::linear_scan_allows(ranges, a, rd));
    }
  }
}

TEST(RuleTable, ValueFormsLeaveInputUntouched) {
  const RuleTable empty(2);
  const RuleTable one = table_insert(empty, make_rule(0x1000, SizeCode(0), true, false));
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(table_decide(one, 0x1FFF, AccessKind::Read), Decision::Allow);
  EXPECT_TRUE(table_flush(one).empty());
}

}  // namespace
}  // namespace nocf
