#include "nocf/bus.hpp"

#include <cstdio>
#include <stdexcept>

namespace nocf {

bool is_valid(const AddressRequest& req) {
  return req.id <= kIdMask && req.burst_len >= 1 && req.burst_len <= kMaxBurstLen &&
         req.burst_size_log2 <= kMaxBurstSizeLog2;
}

AddressRequest make_request(std::uint8_t id, Address addr, AccessKind kind,
                            std::uint8_t burst_len, std::uint8_t burst_size_log2,
                            BurstType burst_type) {
  AddressRequest req{id, addr, kind, burst_len, burst_size_log2, burst_type};
  if (!is_valid(req)) {
    throw std::invalid_argument("malformed address request: " + to_string(req));
  }
  return req;
}

std::vector<Address> burst_footprint(const AddressRequest& req) {
  std::vector<Address> beats;
  beats.reserve(req.burst_len);
  const Address stride =
      req.burst_type == BurstType::Incr ? (Address{1} << req.burst_size_log2) : 0;
  Address a = req.addr;
  for (unsigned i = 0; i < req.burst_len; ++i) {
    beats.push_back(a);
    a += stride;  // unsigned wrap is the 2^32 modulus
  }
  return beats;
}

std::string_view to_string(AccessKind kind) {
  return kind == AccessKind::Read ? "read" : "write";
}

std::string_view to_string(BurstType type) {
  return type == BurstType::Incr ? "incr" : "fixed";
}

std::string_view to_string(ResponseKind kind) {
  return kind == ResponseKind::Okay ? "okay" : "decerr";
}

std::string to_string(const AddressRequest& req) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s id=%u addr=0x%08X len=%u size=%u %s",
                req.kind == AccessKind::Read ? "R" : "W", unsigned{req.id}, req.addr,
                unsigned{req.burst_len}, 1u << req.burst_size_log2,
                std::string(to_string(req.burst_type)).c_str());
  return buf;
}

std::optional<AccessKind> parse_access_kind(std::string_view text) {
  if (text == "read" || text == "r") return AccessKind::Read;
  if (text == "write" || text == "w") return AccessKind::Write;
  return std::nullopt;
}

std::optional<BurstType> parse_burst_type(std::string_view text) {
  if (text == "incr") return BurstType::Incr;
  if (text == "fixed") return BurstType::Fixed;
  return std::nullopt;
}

}  // namespace nocf
