#include "nocf/codec.hpp"

#include <cstdio>

namespace nocf {
namespace {

constexpr std::uint32_t kOpShift = 30;
constexpr std::uint32_t kOpNewRule = 0b00;
constexpr std::uint32_t kOpFlush = 0b01;
constexpr std::uint32_t kOpEnforceRead = 0b10;
constexpr std::uint32_t kOpEnforceWrite = 0b11;

constexpr std::uint32_t kSizeShift = 26;
constexpr std::uint32_t kReadBit = 1u << 25;
constexpr std::uint32_t kWriteBit = 1u << 24;
constexpr std::uint32_t kPageShift = 4;
constexpr std::uint32_t kPageMask = 0xFFFFF;
constexpr std::uint32_t kPayloadMask = (1u << kOpShift) - 1;

constexpr std::uint32_t kIntrReserved = 0xFFEu;

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

}  // namespace

FslWord encode_command(const Command& cmd) {
  if (const auto* nr = std::get_if<NewRuleCmd>(&cmd)) {
    if (nr->base_page > kPageMask) {
      throw std::invalid_argument("NewRule base page exceeds 20 bits: " + hex(nr->base_page));
    }
    if (!is_aligned(nr->base(), nr->size)) {
      throw std::invalid_argument("NewRule base " + hex(nr->base()) +
                                  " not aligned to size code " +
                                  std::to_string(nr->size.code()));
    }
    std::uint32_t w = kOpNewRule << kOpShift;
    w |= std::uint32_t{nr->size.code()} << kSizeShift;
    if (nr->allow_read) w |= kReadBit;
    if (nr->allow_write) w |= kWriteBit;
    w |= nr->base_page << kPageShift;
    return FslWord{w};
  }
  if (std::holds_alternative<FlushCmd>(cmd)) return FslWord{kOpFlush << kOpShift};
  const auto& en = std::get<EnforceCmd>(cmd);
  return FslWord{(en.channel == AccessKind::Read ? kOpEnforceRead : kOpEnforceWrite) << kOpShift};
}

std::optional<Command> try_decode_command(FslWord w) noexcept {
  const std::uint32_t op = w.raw >> kOpShift;
  const std::uint32_t payload = w.raw & kPayloadMask;
  switch (op) {
    case kOpNewRule: {
      if ((payload & 0xF) != 0) return std::nullopt;
      NewRuleCmd nr;
      nr.size = SizeCode((payload >> kSizeShift) & 0xF);
      nr.allow_read = (payload & kReadBit) != 0;
      nr.allow_write = (payload & kWriteBit) != 0;
      nr.base_page = (payload >> kPageShift) & kPageMask;
      if (!is_aligned(nr.base(), nr.size)) return std::nullopt;
      return nr;
    }
    case kOpFlush:
      if (payload != 0) return std::nullopt;
      return FlushCmd{};
    case kOpEnforceRead:
      if (payload != 0) return std::nullopt;
      return EnforceCmd{AccessKind::Read};
    default:
      if (payload != 0) return std::nullopt;
      return EnforceCmd{AccessKind::Write};
  }
}

Command decode_command(FslWord w) {
  auto cmd = try_decode_command(w);
  if (!cmd) throw MalformedWord("malformed command word " + hex(w.raw));
  return *cmd;
}

NewRuleCmd new_rule_from(const PolicyRule& rule) {
  return NewRuleCmd{rule.base >> 12, rule.size, rule.allow_read, rule.allow_write};
}

PolicyRule rule_from(const NewRuleCmd& cmd) {
  return make_rule(cmd.base(), cmd.size, cmd.allow_read, cmd.allow_write);
}

IntrWord encode_intr(Address addr, AccessKind kind) {
  return IntrWord{(addr & 0xFFFFF000u) | (kind == AccessKind::Read ? 1u : 0u)};
}

std::optional<IntrInfo> try_decode_intr(IntrWord w) noexcept {
  if ((w.raw & kIntrReserved) != 0) return std::nullopt;
  return IntrInfo{w.raw >> 12, (w.raw & 1u) ? AccessKind::Read : AccessKind::Write};
}

IntrInfo decode_intr(IntrWord w) {
  auto info = try_decode_intr(w);
  if (!info) throw MalformedWord("malformed interrupt word " + hex(w.raw));
  return *info;
}

std::string to_string(const Command& cmd) {
  if (const auto* nr = std::get_if<NewRuleCmd>(&cmd)) {
    return "new_rule base=" + hex(nr->base()) + " size=" + std::to_string(nr->size.code()) +
           (nr->allow_read ? " R" : "") + (nr->allow_write ? " W" : "");
  }
  if (std::holds_alternative<FlushCmd>(cmd)) return "flush";
  return std::get<EnforceCmd>(cmd).channel == AccessKind::Read ? "enforce_read"
                                                               : "enforce_write";
}

}  // namespace nocf
