#include <gtest/gtest.h>

#include "nocf/bus.hpp"

namespace nocf {
namespace {

TEST(Bus, HandshakeNeedsValidAndReady) {
  const PortAction req = make_request(1, 0x1000, AccessKind::Read);
  EXPECT_TRUE(handshake(req, true));
  EXPECT_FALSE(handshake(req, false));
  EXPECT_FALSE(handshake(std::nullopt, true));
}

TEST(Bus, MakeRequestRejectsOutOfRangeFields) {
  EXPECT_THROW(make_request(16, 0, AccessKind::Read), std::invalid_argument);
  EXPECT_THROW(make_request(0, 0, AccessKind::Read, 0), std::invalid_argument);
  EXPECT_THROW(make_request(0, 0, AccessKind::Read, 17), std::invalid_argument);
  EXPECT_THROW(make_request(0, 0, AccessKind::Read, 1, 3), std::invalid_argument);
  EXPECT_NO_THROW(make_request(15, 0, AccessKind::Write, 16, 2));
}

TEST(Bus, IncrFootprintStepsByBeatSize) {
  const auto beats = burst_footprint(make_request(0, 0x100, AccessKind::Read, 4, 2));
  EXPECT_EQ(beats, (std::vector<Address>{0x100, 0x104, 0x108, 0x10C}));
}

TEST(Bus, FixedFootprintRepeatsAddress) {
  const auto beats =
      burst_footprint(make_request(0, 0x40, AccessKind::Write, 3, 1, BurstType::Fixed));
  EXPECT_EQ(beats, (std::vector<Address>{0x40, 0x40, 0x40}));
}

TEST(Bus, FootprintWrapsAtTopOfAddressSpace) {
  const auto beats = burst_footprint(make_request(0, 0xFFFFFFFC, AccessKind::Read, 3, 2));
  EXPECT_EQ(beats, (std::vector<Address>{0xFFFFFFFC, 0x0, 0x4}));
}

TEST(Bus, FootprintMatchesEnumeration) {
  for (unsigned len = 1; len <= kMaxBurstLen; ++len) {
    for (unsigned sz = 0; sz <= kMaxBurstSizeLog2; ++sz) {
      const auto req = make_request(0, 0x80000000, AccessKind::Read, static_cast<std::uint8_t>(len),
                                    static_cast<std::uint8_t>(sz));
      const auto beats = burst_footprint(req);
      ASSERT_EQ(beats.size(), len);
      for (unsigned i = 0; i < len; ++i) EXPECT_EQ(beats[i], 0x80000000u + i * (1u << sz));
    }
  }
}

TEST(Bus, ParseNames) {
  EXPECT_EQ(parse_access_kind("read"), AccessKind::Read);
  EXPECT_EQ(parse_access_kind("write"), AccessKind::Write);
  EXPECT_FALSE(parse_access_kind("rw"));
  EXPECT_EQ(parse_burst_type("fixed"), BurstType::Fixed);
}

}  // namespace
}  // namespace nocf
