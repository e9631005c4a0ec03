#pragma once

// Misbehaving masters: the per-cycle attacker used by the model checker, and
// a malicious GPU that executes write commands hidden in the least
// significant byte of framebuffer pixels.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "nocf/bus.hpp"
#include "nocf/master.hpp"
#include "nocf/policy.hpp"

namespace nocf {

// ---------------------------------------------------------------------------
// Per-cycle attacker

enum class AttackChoice : std::uint8_t { NoRequest, Permissible, Impermissible };

std::string_view to_string(AttackChoice c);

class AttackDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Candidate addresses split by a fixed reference policy, per access kind.
class AttackDomain {
 public:
  /// Throws AttackDomainError unless, for each kind in `kinds`, at least one
  /// address is allowed and one denied by `reference`.
  AttackDomain(const std::vector<Address>& addresses, const RuleTable& reference,
               const std::vector<AccessKind>& kinds = {AccessKind::Read, AccessKind::Write});

  const std::vector<Address>& allowed(AccessKind k) const {
    return k == AccessKind::Read ? allowed_r_ : allowed_w_;
  }
  const std::vector<Address>& denied(AccessKind k) const {
    return k == AccessKind::Read ? denied_r_ : denied_w_;
  }

 private:
  std::vector<Address> allowed_r_, denied_r_, allowed_w_, denied_w_;
};

/// Wires for one attacker choice. `index` selects among several candidate
/// addresses of the chosen class.
PortAction attacker_emit(AttackChoice choice, const AttackDomain& domain, AccessKind kind,
                         std::size_t index = 0, std::uint8_t id = 0);

/// One channel of the attacker as seen by the checker: the request it still
/// owes the AXI hold requirement, if any.
struct AttackerPort {
  std::optional<AddressRequest> outstanding;
  friend bool operator==(const AttackerPort&, const AttackerPort&) = default;
};

struct AttackerMove {
  AttackChoice choice = AttackChoice::NoRequest;
  std::size_t index = 0;
  PortAction wires;
};

/// Moves available this cycle. Without mutation an unacknowledged request
/// must be held, so the only move is to present it again.
std::vector<AttackerMove> attacker_moves(const AttackerPort& port, bool may_mutate,
                                         const AttackDomain& domain, AccessKind kind,
                                         std::uint8_t id);

/// Attacker state after the cycle, given what it drove and whether it was acked.
AttackerPort attacker_after(const AttackerPort& port, bool may_mutate, const PortAction& wires,
                            bool acked);

// ---------------------------------------------------------------------------
// Steganographic command channel

inline constexpr std::size_t kTriggerLen = 8;
using Trigger = std::array<std::uint8_t, kTriggerLen>;

inline constexpr Trigger kDefaultTrigger = {0xC7, 0x1E, 0x5A, 0x93, 0x0F, 0xE4, 0x68, 0xB2};

struct Framebuffer {
  Address base = 0;
  std::vector<std::uint32_t> pixels;  // byte 0 (LSB) of each pixel carries data
};

struct StegoCommand {
  Trigger trigger = kDefaultTrigger;
  Address dest = 0;
  std::vector<std::uint8_t> payload;  // at most 65535 bytes

  friend bool operator==(const StegoCommand&, const StegoCommand&) = default;
};

/// Carrier bytes a command occupies: trigger, 4-byte dest, 2-byte length, payload.
std::size_t stego_footprint(const StegoCommand& cmd);

/// Writes `cmd` into the carrier bytes of consecutive pixels from
/// `start_pixel`; bytes 1..3 of every pixel are left untouched. Throws
/// std::length_error when the framebuffer is too small.
Framebuffer stego_encode(Framebuffer fb, const StegoCommand& cmd, std::size_t start_pixel = 0);

/// Parses a command starting at `start_pixel`, or nullopt when the trigger
/// does not match or the framebuffer ends first.
std::optional<StegoCommand> stego_decode(const Framebuffer& fb, const Trigger& trigger,
                                         std::size_t start_pixel = 0);

/// Little-endian byte image of the framebuffer.
std::vector<std::uint8_t> framebuffer_bytes(const Framebuffer& fb);

// ---------------------------------------------------------------------------
// Malicious GPU

struct GpuConfig {
  Address fb_base = 0;
  std::size_t fb_pixels = 0;
  std::uint64_t start_cycle = 0;  // when the driver points the GPU at fb_base
  Trigger trigger = kDefaultTrigger;
  std::uint8_t id = 0;
};

enum class GpuState : std::uint8_t { Idle, Scanning, Writing };

std::string_view to_string(GpuState s);

/// Reads its framebuffer one pixel per request. When the carrier bytes at
/// the current scan position start with the trigger it parses a command and
/// writes the payload, four bytes per request, then resumes scanning. Any
/// decode error or a missing trigger sends it back to Idle.
class GpuModel final : public MasterBehavior {
 public:
  explicit GpuModel(GpuConfig cfg);

  MasterOutput present(std::uint64_t cycle) override;
  std::vector<std::uint8_t> write_data(const AddressRequest& req) override;
  void feedback(std::uint64_t cycle, const PortFeedback& fb) override;
  bool done() const override { return state_ == GpuState::Idle && started_; }

  GpuState state() const { return state_; }
  std::size_t scan_offset() const { return scan_offset_; }
  std::uint64_t reads_ok() const { return reads_ok_; }
  std::uint64_t writes_ok() const { return writes_ok_; }
  std::uint64_t bytes_written() const { return bytes_written_; }
  std::uint64_t decode_errors() const { return decode_errors_; }
  std::uint64_t commands_seen() const { return commands_seen_; }

 private:
  void take_carrier(std::uint8_t b);
  void start_writing();
  AddressRequest next_write() const;

  GpuConfig cfg_;
  GpuState state_ = GpuState::Idle;
  bool started_ = false;

  // Scanning
  std::size_t scan_offset_ = 0;
  std::vector<std::uint8_t> carrier_;

  // Writing
  Address dest_ = 0;
  std::vector<std::uint8_t> payload_;
  std::size_t written_ = 0;

  bool presenting_ = false;
  bool in_flight_ = false;

  std::uint64_t reads_ok_ = 0;
  std::uint64_t writes_ok_ = 0;
  std::uint64_t bytes_written_ = 0;
  std::uint64_t decode_errors_ = 0;
  std::uint64_t commands_seen_ = 0;
};

}  // namespace nocf
