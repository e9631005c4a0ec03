#pragma once

// 32-bit words exchanged between an interposer and the integrity core.
//
// Command word (core -> interposer):
//   [31:30] opcode  00 NewRule, 01 Flush, 10 EnforceRead, 11 EnforceWrite
//   NewRule: [29:26] size code, [25] allow_read, [24] allow_write,
//            [23:4] base page (address bits 31:12), [3:0] zero
//   others:  [29:0] zero
//
// Interrupt word (interposer -> core):
//   [31:12] faulting page (address bits 31:12), [11:1] zero, [0] 1 = read

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "nocf/bus.hpp"
#include "nocf/policy.hpp"

namespace nocf {

struct FslWord {
  std::uint32_t raw = 0;
  friend bool operator==(FslWord, FslWord) = default;
};

struct NewRuleCmd {
  std::uint32_t base_page = 0;  // 20 bits
  SizeCode size;
  bool allow_read = false;
  bool allow_write = false;

  Address base() const { return base_page << 12; }
  friend bool operator==(const NewRuleCmd&, const NewRuleCmd&) = default;
};
struct FlushCmd {
  friend bool operator==(FlushCmd, FlushCmd) = default;
};
struct EnforceCmd {
  AccessKind channel = AccessKind::Read;
  friend bool operator==(EnforceCmd, EnforceCmd) = default;
};

using Command = std::variant<NewRuleCmd, FlushCmd, EnforceCmd>;

class MalformedWord : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument for a NewRule whose base page exceeds 20 bits
/// or whose base is not aligned to its size.
FslWord encode_command(const Command& cmd);
/// Throws MalformedWord when reserved bits are set.
Command decode_command(FslWord w);
std::optional<Command> try_decode_command(FslWord w) noexcept;

NewRuleCmd new_rule_from(const PolicyRule& rule);
PolicyRule rule_from(const NewRuleCmd& cmd);

struct IntrWord {
  std::uint32_t raw = 0;
  friend bool operator==(IntrWord, IntrWord) = default;
};

struct IntrInfo {
  std::uint32_t page = 0;  // address bits 31:12
  AccessKind kind = AccessKind::Read;

  Address page_base() const { return page << 12; }
  friend bool operator==(const IntrInfo&, const IntrInfo&) = default;
};

IntrWord encode_intr(Address addr, AccessKind kind);
/// Throws MalformedWord when bits 11:1 are nonzero.
IntrInfo decode_intr(IntrWord w);
std::optional<IntrInfo> try_decode_intr(IntrWord w) noexcept;

std::string to_string(const Command& cmd);

}  // namespace nocf
