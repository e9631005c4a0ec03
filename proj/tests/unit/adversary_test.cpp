#include <gtest/gtest.h>

#include <random>

#include "nocf/adversary.hpp"

namespace nocf {
namespace {

RuleTable one_mib_policy() {
  RuleTable t(2);
  t.insert(make_rule(0x80000000, SizeCode(8), true, true));
  return t;
}

TEST(Attacker, DomainSplitsByPolicy) {
  const AttackDomain d({0x80000000, 0x90000000}, one_mib_policy());
  EXPECT_EQ(attacker_emit(AttackChoice::Permissible, d, AccessKind::Read)->addr, 0x80000000u);
  EXPECT_EQ(attacker_emit(AttackChoice::Impermissible, d, AccessKind::Write)->addr, 0x90000000u);
  EXPECT_FALSE(attacker_emit(AttackChoice::NoRequest, d, AccessKind::Read));
}

TEST(Attacker, DomainWithoutDeniedAddressIsRejected) {
  EXPECT_THROW(AttackDomain({0x80000000, 0x80000100}, one_mib_policy()), AttackDomainError);
  EXPECT_THROW(AttackDomain({0x90000000}, one_mib_policy()), AttackDomainError);
}

TEST(Attacker, HoldWithoutMutation) {
  const AttackDomain d({0x80000000, 0x90000000}, one_mib_policy());
  AttackerPort p;
  EXPECT_EQ(attacker_moves(p, false, d, AccessKind::Read, 0).size(), 3u);
  const auto wires = attacker_emit(AttackChoice::Permissible, d, AccessKind::Read);
  p = attacker_after(p, false, wires, false);
  const auto held = attacker_moves(p, false, d, AccessKind::Read, 0);
  ASSERT_EQ(held.size(), 1u);
  EXPECT_EQ(held[0].wires, wires);
  p = attacker_after(p, false, wires, true);
  EXPECT_FALSE(p.outstanding);
}

TEST(Attacker, MutationKeepsAllMoves) {
  const AttackDomain d({0x80000000, 0x90000000}, one_mib_policy());
  AttackerPort p;
  p = attacker_after(p, true, attacker_emit(AttackChoice::Permissible, d, AccessKind::Read), false);
  EXPECT_EQ(attacker_moves(p, true, d, AccessKind::Read, 0).size(), 3u);
}

Framebuffer noise_fb(std::size_t pixels, std::uint32_t seed) {
  std::mt19937 rng(seed);
  Framebuffer fb{0x80400000, {}};
  for (std::size_t i = 0; i < pixels; ++i) fb.pixels.push_back(rng());
  return fb;
}

TEST(Stego, RoundTripAndUntouchedColourBytes) {
  const Framebuffer fb = noise_fb(256, 1);
  StegoCommand cmd;
  cmd.dest = 0x80012340;
  for (int i = 0; i < 20; ++i) cmd.payload.push_back(static_cast<std::uint8_t>(0xA0 + i));
  const Framebuffer enc = stego_encode(fb, cmd, 3);
  ASSERT_EQ(stego_decode(enc, kDefaultTrigger, 3), cmd);
  for (std::size_t i = 0; i < fb.pixels.size(); ++i) {
    EXPECT_EQ(enc.pixels[i] & 0xFFFFFF00u, fb.pixels[i] & 0xFFFFFF00u);
  }
  EXPECT_EQ(stego_footprint(cmd), 8u + 4 + 2 + 20);
}

TEST(Stego, TooSmallFramebufferThrows) {
  StegoCommand cmd;
  cmd.payload.assign(100, 1);
  EXPECT_THROW(stego_encode(noise_fb(50, 2), cmd), std::length_error);
}

TEST(Stego, DecodeNeedsTrigger) {
  Framebuffer fb = noise_fb(64, 3);
  fb.pixels[0] = (fb.pixels[0] & ~0xFFu) | static_cast<std::uint8_t>(kDefaultTrigger[0] ^ 0xFF);
  EXPECT_FALSE(stego_decode(fb, kDefaultTrigger));
}

// Runs a GPU against a perfect port: every request is acked at once and
// reads return the framebuffer pixel.
struct IdealPort {
  GpuModel gpu;
  Framebuffer fb;
  std::vector<AddressRequest> writes;

  void run(std::uint64_t cycles) {
    for (std::uint64_t c = 0; c < cycles; ++c) {
      const MasterOutput o = gpu.present(c);
      PortFeedback f;
      if (o.read) {
        f.read_ack = true;
        const std::size_t px = (o.read->addr - fb.base) / 4;
        std::vector<std::uint8_t> data(4, 0);
        if (px < fb.pixels.size()) {
          for (int b = 0; b < 4; ++b) data[b] = static_cast<std::uint8_t>(fb.pixels[px] >> (8 * b));
        }
        f.reads.push_back({*o.read, data});
        f.responses.push_back({AccessKind::Read, o.read->id, ResponseKind::Okay, true});
      }
      if (o.write) {
        f.write_ack = true;
        writes.push_back(*o.write);
        f.responses.push_back({AccessKind::Write, o.write->id, ResponseKind::Okay, true});
      }
      gpu.feedback(c, f);
    }
  }
};

TEST(Gpu, FramebufferWithoutTriggerNeverWrites) {
  Framebuffer fb = noise_fb(128, 4);
  fb.pixels[0] = (fb.pixels[0] & ~0xFFu) | static_cast<std::uint8_t>(kDefaultTrigger[0] ^ 0xFF);
  IdealPort port{GpuModel(GpuConfig{fb.base, fb.pixels.size(), 0, kDefaultTrigger, 1}), fb, {}};
  port.run(2000);
  EXPECT_TRUE(port.writes.empty());
  EXPECT_EQ(port.gpu.commands_seen(), 0u);
  EXPECT_EQ(port.gpu.state(), GpuState::Idle);
}

TEST(Gpu, TriggeredCommandWritesPayload) {
  StegoCommand cmd;
  cmd.dest = 0x80012340;
  cmd.payload.assign(20, 0x5A);
  const Framebuffer fb = stego_encode(noise_fb(128, 5), cmd);
  IdealPort port{GpuModel(GpuConfig{fb.base, fb.pixels.size(), 0, kDefaultTrigger, 1}), fb, {}};
  port.run(2000);
  EXPECT_EQ(port.gpu.commands_seen(), 1u);
  EXPECT_EQ(port.gpu.bytes_written(), 20u);
  ASSERT_FALSE(port.writes.empty());
  EXPECT_EQ(port.writes.front().addr, 0x80012340u);
  EXPECT_EQ(port.writes.size(), 5u);
}

}  // namespace
}  // namespace nocf
