#pragma once

// Shared bus vocabulary: addresses, address-channel requests, responses and
// the valid/ready handshake.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nocf {

using Address = std::uint32_t;

enum class AccessKind : std::uint8_t { Read, Write };
enum class BurstType : std::uint8_t { Fixed, Incr };
enum class ResponseKind : std::uint8_t { Okay, DecodeError };

inline constexpr std::uint8_t kMaxBurstLen = 16;
inline constexpr std::uint8_t kMaxBurstSizeLog2 = 2;
inline constexpr std::uint8_t kIdMask = 0x0F;

/// One address-channel beat as driven by a master.
struct AddressRequest {
  std::uint8_t id = 0;
  Address addr = 0;
  AccessKind kind = AccessKind::Read;
  std::uint8_t burst_len = 1;
  std::uint8_t burst_size_log2 = 2;
  BurstType burst_type = BurstType::Incr;

  friend bool operator==(const AddressRequest&, const AddressRequest&) = default;
};

/// Builds a request, throwing std::invalid_argument when a field is out of
/// range (id > 15, burst_len outside 1..16, burst_size_log2 > 2).
AddressRequest make_request(std::uint8_t id, Address addr, AccessKind kind,
                            std::uint8_t burst_len = 1,
                            std::uint8_t burst_size_log2 = 2,
                            BurstType burst_type = BurstType::Incr);

bool is_valid(const AddressRequest& req);

/// Bytes the burst touches at the start of each beat, in beat order.
/// Arithmetic wraps modulo 2^32.
std::vector<Address> burst_footprint(const AddressRequest& req);

/// What a master drives on one address channel during a cycle. An empty
/// optional means valid is low.
using PortAction = std::optional<AddressRequest>;

/// A request transfers exactly when it is presented and the receiver is ready.
constexpr bool handshake(const PortAction& action, bool ready) {
  return action.has_value() && ready;
}

struct Response {
  AccessKind channel = AccessKind::Read;
  std::uint8_t id = 0;
  ResponseKind kind = ResponseKind::Okay;
  bool last = true;

  friend bool operator==(const Response&, const Response&) = default;
};

std::string_view to_string(AccessKind kind);
std::string_view to_string(BurstType type);
std::string_view to_string(ResponseKind kind);
std::string to_string(const AddressRequest& req);

std::optional<AccessKind> parse_access_kind(std::string_view text);
std::optional<BurstType> parse_burst_type(std::string_view text);

}  // namespace nocf
