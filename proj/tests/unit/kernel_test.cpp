#include <gtest/gtest.h>

#include "nocf/kernel.hpp"

namespace nocf {
namespace {

GrantMap sample_map() {
  return GrantMap({
      {"a", 0x80000000, SizeCode(15), true, true},
      {"a", 0x90000000, SizeCode(0), false, true},
      {"b", 0x80000000, SizeCode(0), true, false},
  });
}

TEST(GrantMap, ContainingEntryIsGranted) {
  const auto g = sample_map().calculate_region("a", 0x80001, AccessKind::Read);
  ASSERT_TRUE(g);
  EXPECT_EQ(*g, (RegionGrant{0x80000000, SizeCode(15), true, true}));
}

TEST(GrantMap, ContainmentAgreesWithRangeCheck) {
  const GrantMap map = sample_map();
  for (std::uint32_t page = 0x7FFF0; page < 0x88010; page += 0x7) {
    const bool inside = page >= 0x80000 && page < 0x80000 + (128u << 8);
    EXPECT_EQ(map.calculate_region("a", page, AccessKind::Write).has_value(), inside) << page;
  }
}

TEST(GrantMap, MissingOrWrongPermissionDenies) {
  const GrantMap map = sample_map();
  EXPECT_FALSE(map.calculate_region("a", 0xA0000, AccessKind::Read));
  EXPECT_FALSE(map.calculate_region("a", 0x90000, AccessKind::Read));
  EXPECT_TRUE(map.calculate_region("a", 0x90000, AccessKind::Write));
  EXPECT_FALSE(map.calculate_region("b", 0x80000, AccessKind::Write));
  EXPECT_FALSE(map.calculate_region("nobody", 0x80000, AccessKind::Read));
}

TEST(GrantMap, RejectsUnalignedAndOverlapping) {
  EXPECT_THROW(GrantMap({{"a", 0x80001000, SizeCode(4), true, true}}), GrantMapError);
  EXPECT_THROW(GrantMap({{"a", 0x80000000, SizeCode(8), true, true},
                         {"a", 0x80010000, SizeCode(0), true, true}}),
               GrantMapError);
  // Different masters may share memory.
  EXPECT_NO_THROW(GrantMap({{"a", 0x80000000, SizeCode(8), true, true},
                            {"b", 0x80000000, SizeCode(8), true, true}}));
}

TEST(Kernel, GrantRepliesNewRuleThenEnforce) {
  IntegrityKernel k(sample_map(), 3);
  const auto link = k.add_link("a");
  const auto words = k.handle_intr(link, encode_intr(0x80001ABC, AccessKind::Read));
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(decode_command(words[0]),
            Command(NewRuleCmd{0x80000, SizeCode(15), true, true}));
  EXPECT_EQ(decode_command(words[1]), Command(EnforceCmd{AccessKind::Read}));
  EXPECT_EQ(k.stats().grants, 1u);
}

TEST(Kernel, DenialRepliesEnforceOnly) {
  IntegrityKernel k(sample_map(), 3);
  k.add_link("b");
  const auto words = k.handle_intr(0, encode_intr(0x80000010, AccessKind::Write));
  ASSERT_EQ(words.size(), 1u);
  EXPECT_EQ(decode_command(words[0]), Command(EnforceCmd{AccessKind::Write}));
  EXPECT_EQ(k.stats().denials, 1u);
}

TEST(Kernel, MalformedInterruptFailsClosed) {
  IntegrityKernel k(sample_map(), 3);
  k.add_link("a");
  const auto words = k.handle_intr(0, IntrWord{0x80001003});
  ASSERT_EQ(words.size(), 1u);
  EXPECT_EQ(decode_command(words[0]), Command(EnforceCmd{AccessKind::Read}));
  EXPECT_EQ(k.stats().malformed, 1u);
}

TEST(Kernel, EveryReplyHasExactlyOneEnforce) {
  for (bool grant : {false, true}) {
    const auto words = abstract_reply(IntrInfo{0x90000, AccessKind::Write}, grant);
    int enforces = 0;
    for (auto w : words) enforces += std::holds_alternative<EnforceCmd>(decode_command(w));
    EXPECT_EQ(enforces, 1);
    EXPECT_EQ(words.size(), grant ? 2u : 1u);
  }
}

TEST(Kernel, AbstractGrantCoversFaultingPageOnly) {
  const auto words = abstract_reply(IntrInfo{0x90000, AccessKind::Write}, true);
  EXPECT_EQ(decode_command(words[0]), Command(NewRuleCmd{0x90000, SizeCode(0), false, true}));
}

TEST(Kernel, ServiceHonoursLatencyAndRoutesPerLink) {
  IntegrityKernel k(sample_map(), 3);
  k.add_link("a");
  k.add_link("b");
  std::vector<FifoLink<IntrWord>> up(2, FifoLink<IntrWord>(4));
  std::vector<FifoLink<FslWord>> down(2, FifoLink<FslWord>(4));
  up[1].try_push(encode_intr(0x80000000, AccessKind::Read));
  k.service(10, up, down);
  EXPECT_EQ(k.pending(), 1u);
  for (std::uint64_t c = 11; c < 13; ++c) {
    k.service(c, up, down);
    EXPECT_TRUE(down[1].empty());
  }
  k.service(13, up, down);
  EXPECT_TRUE(down[0].empty());
  EXPECT_EQ(down[1].size(), 2u);
}

TEST(Kernel, ReplyWaitsForRoomOnDownlink) {
  IntegrityKernel k(sample_map(), 0);
  k.add_link("a");
  std::vector<FifoLink<IntrWord>> up(1, FifoLink<IntrWord>(4));
  std::vector<FifoLink<FslWord>> down(1, FifoLink<FslWord>(2));
  down[0].try_push(FslWord{0x40000000});
  up[0].try_push(encode_intr(0x80000000, AccessKind::Read));
  k.service(0, up, down);
  EXPECT_EQ(k.pending(), 1u);
  down[0].pop();
  k.service(1, up, down);
  EXPECT_EQ(k.pending(), 0u);
  EXPECT_EQ(down[0].size(), 2u);
}

TEST(FifoLink, OrderAndBackpressure) {
  FifoLink<int> q(2);
  EXPECT_TRUE(q.try_push(1));
  EXPECT_TRUE(q.try_push(2));
  EXPECT_FALSE(q.try_push(3));
  EXPECT_EQ(q.pop(), 1);
  EXPECT_EQ(q.pop(), 2);
  EXPECT_FALSE(q.pop());
  EXPECT_THROW(FifoLink<int>(0), std::invalid_argument);
}

}  // namespace
}  // namespace nocf
