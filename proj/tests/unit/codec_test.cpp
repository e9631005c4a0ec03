#include <gtest/gtest.h>

#include <random>

#include "nocf/codec.hpp"
#include "oracles.hpp"

namespace nocf {
namespace {

TEST(Codec, WorkedNewRuleWord) {
  const Command c = NewRuleCmd{0x44A00, SizeCode(4), true, true};
  EXPECT_EQ(encode_command(c).raw, 0x1344A000u);
  EXPECT_EQ(oracle::new_rule_word(0x44A00, 4, true, true), 0x1344A000u);
}

TEST(Codec, BareOpcodes) {
  EXPECT_EQ(encode_command(FlushCmd{}).raw, 0x40000000u);
  EXPECT_EQ(encode_command(EnforceCmd{AccessKind::Read}).raw, oracle::bare_word(2));
  EXPECT_EQ(encode_command(EnforceCmd{AccessKind::Write}).raw, oracle::bare_word(3));
}

TEST(Codec, ReservedBitsAreMalformed) {
  EXPECT_THROW(decode_command(FslWord{0x40000001}), MalformedWord);
  EXPECT_THROW(decode_command(FslWord{0x1344A001}), MalformedWord);
  EXPECT_FALSE(try_decode_command(FslWord{0x80000010}));
}

TEST(Codec, UnalignedNewRuleRejected) {
  // 64 KiB region (code 4) needs the low four page bits clear.
  EXPECT_THROW(encode_command(NewRuleCmd{0x44A01, SizeCode(4), true, true}),
               std::invalid_argument);
  EXPECT_THROW(encode_command(NewRuleCmd{0x100000, SizeCode(0), true, true}),
               std::invalid_argument);
}

TEST(Codec, NewRuleRoundTripAgainstOracle) {
  std::mt19937 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const unsigned code = rng() % 16;
    std::uint32_t page = rng() & 0xFFFFF;
    page &= ~((1u << code) - 1) & 0xFFFFF;
    const bool r = rng() & 1, w = rng() & 1;
    const Command c = NewRuleCmd{page, SizeCode(code), r, w};
    const FslWord word = encode_command(c);
    EXPECT_EQ(word.raw, oracle::new_rule_word(page, code, r, w));
    EXPECT_EQ(decode_command(word), c);
  }
}

TEST(Codec, RuleConversionRoundTrip) {
  const auto rule = make_rule(0x80000000, SizeCode(15), true, false);
  EXPECT_TRUE(rule_from(new_rule_from(rule)).same_grant(rule));
}

TEST(Codec, InterruptWords) {
  EXPECT_EQ(encode_intr(0x80001ABC, AccessKind::Read).raw, 0x80001001u);
  EXPECT_EQ(encode_intr(0x0, AccessKind::Write).raw, 0u);
  std::mt19937 rng(9);
  for (int i = 0; i < 2000; ++i) {
    const Address a = rng();
    const bool rd = rng() & 1;
    const IntrWord w = encode_intr(a, rd ? AccessKind::Read : AccessKind::Write);
    EXPECT_EQ(w.raw, oracle::intr_word(a, rd));
    const IntrInfo info = decode_intr(w);
    EXPECT_EQ(info.page, a >> 12);
    EXPECT_EQ(info.kind == AccessKind::Read, rd);
  }
  EXPECT_THROW(decode_intr(IntrWord{0x80001003}), MalformedWord);
}

}  // namespace
}  // namespace nocf
