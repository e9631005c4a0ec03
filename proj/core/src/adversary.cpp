#include "nocf/adversary.hpp"

#include <algorithm>

namespace nocf {

std::string_view to_string(AttackChoice c) {
  switch (c) {
    case AttackChoice::NoRequest: return "none";
    case AttackChoice::Permissible: return "permissible";
    case AttackChoice::Impermissible: return "impermissible";
  }
  return "?";
}

AttackDomain::AttackDomain(const std::vector<Address>& addresses, const RuleTable& reference,
                           const std::vector<AccessKind>& kinds) {
  for (Address a : addresses) {
    (reference.decide(a, AccessKind::Read) == Decision::Allow ? allowed_r_ : denied_r_)
        .push_back(a);
    (reference.decide(a, AccessKind::Write) == Decision::Allow ? allowed_w_ : denied_w_)
        .push_back(a);
  }
  for (AccessKind k : kinds) {
    if (allowed(k).empty() || denied(k).empty()) {
      throw AttackDomainError(std::string("attack domain needs an allowed and a denied ") +
                              std::string(to_string(k)) + " address");
    }
  }
}

PortAction attacker_emit(AttackChoice choice, const AttackDomain& domain, AccessKind kind,
                         std::size_t index, std::uint8_t id) {
  if (choice == AttackChoice::NoRequest) return std::nullopt;
  const auto& pool =
      choice == AttackChoice::Permissible ? domain.allowed(kind) : domain.denied(kind);
  if (pool.empty()) return std::nullopt;
  return make_request(id, pool[index % pool.size()], kind);
}

std::vector<AttackerMove> attacker_moves(const AttackerPort& port, bool may_mutate,
                                         const AttackDomain& domain, AccessKind kind,
                                         std::uint8_t id) {
  std::vector<AttackerMove> moves;
  if (!may_mutate && port.outstanding) {
    const bool ok = domain.allowed(kind).end() != std::find(domain.allowed(kind).begin(),
                                                            domain.allowed(kind).end(),
                                                            port.outstanding->addr);
    moves.push_back({ok ? AttackChoice::Permissible : AttackChoice::Impermissible, 0,
                     port.outstanding});
    return moves;
  }
  moves.push_back({AttackChoice::NoRequest, 0, std::nullopt});
  for (std::size_t i = 0; i < domain.allowed(kind).size(); ++i) {
    moves.push_back({AttackChoice::Permissible, i,
                     attacker_emit(AttackChoice::Permissible, domain, kind, i, id)});
  }
  for (std::size_t i = 0; i < domain.denied(kind).size(); ++i) {
    moves.push_back({AttackChoice::Impermissible, i,
                     attacker_emit(AttackChoice::Impermissible, domain, kind, i, id)});
  }
  return moves;
}

AttackerPort attacker_after(const AttackerPort& port, bool may_mutate, const PortAction& wires,
                            bool acked) {
  (void)port;
  if (may_mutate) return {};  // memoryless: nothing is owed
  if (acked || !wires) return {};
  return AttackerPort{wires};
}

// ---------------------------------------------------------------------------

std::size_t stego_footprint(const StegoCommand& cmd) {
  return kTriggerLen + 4 + 2 + cmd.payload.size();
}

namespace {

std::vector<std::uint8_t> carrier_stream(const StegoCommand& cmd) {
  if (cmd.payload.size() > 0xFFFF) throw std::length_error("stego payload exceeds 65535 bytes");
  std::vector<std::uint8_t> s(cmd.trigger.begin(), cmd.trigger.end());
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<std::uint8_t>(cmd.dest >> (8 * i)));
  const auto len = static_cast<std::uint16_t>(cmd.payload.size());
  s.push_back(static_cast<std::uint8_t>(len));
  s.push_back(static_cast<std::uint8_t>(len >> 8));
  s.insert(s.end(), cmd.payload.begin(), cmd.payload.end());
  return s;
}

}  // namespace

Framebuffer stego_encode(Framebuffer fb, const StegoCommand& cmd, std::size_t start_pixel) {
  const auto stream = carrier_stream(cmd);
  if (start_pixel > fb.pixels.size() || fb.pixels.size() - start_pixel < stream.size()) {
    throw std::length_error("framebuffer too small for stego command");
  }
  for (std::size_t i = 0; i < stream.size(); ++i) {
    auto& px = fb.pixels[start_pixel + i];
    px = (px & 0xFFFFFF00u) | stream[i];
  }
  return fb;
}

std::optional<StegoCommand> stego_decode(const Framebuffer& fb, const Trigger& trigger,
                                         std::size_t start_pixel) {
  auto carrier = [&](std::size_t i) -> std::optional<std::uint8_t> {
    if (start_pixel + i >= fb.pixels.size()) return std::nullopt;
    return static_cast<std::uint8_t>(fb.pixels[start_pixel + i] & 0xFF);
  };
  for (std::size_t i = 0; i < kTriggerLen; ++i) {
    auto b = carrier(i);
    if (!b || *b != trigger[i]) return std::nullopt;
  }
  StegoCommand cmd;
  cmd.trigger = trigger;
  std::uint32_t header[6];
  for (std::size_t i = 0; i < 6; ++i) {
    auto b = carrier(kTriggerLen + i);
    if (!b) return std::nullopt;
    header[i] = *b;
  }
  cmd.dest = header[0] | header[1] << 8 | header[2] << 16 | header[3] << 24;
  const std::size_t len = header[4] | header[5] << 8;
  for (std::size_t i = 0; i < len; ++i) {
    auto b = carrier(kTriggerLen + 6 + i);
    if (!b) return std::nullopt;
    cmd.payload.push_back(*b);
  }
  return cmd;
}

std::vector<std::uint8_t> framebuffer_bytes(const Framebuffer& fb) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(fb.pixels.size() * 4);
  for (std::uint32_t px : fb.pixels) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(px >> (8 * i)));
  }
  return bytes;
}

// ---------------------------------------------------------------------------

std::string_view to_string(GpuState s) {
  switch (s) {
    case GpuState::Idle: return "idle";
    case GpuState::Scanning: return "scanning";
    case GpuState::Writing: return "writing";
  }
  return "?";
}

GpuModel::GpuModel(GpuConfig cfg) : cfg_(cfg) {}

AddressRequest GpuModel::next_write() const {
  return make_request(cfg_.id, dest_ + static_cast<Address>(written_), AccessKind::Write, 1, 2);
}

MasterOutput GpuModel::present(std::uint64_t cycle) {
  if (!started_ && cycle >= cfg_.start_cycle) {
    started_ = true;
    state_ = GpuState::Scanning;
  }
  MasterOutput out;
  if (in_flight_) return out;
  if (state_ == GpuState::Scanning) {
    if (scan_offset_ >= cfg_.fb_pixels) {
      state_ = GpuState::Idle;
      return out;
    }
    out.read = make_request(cfg_.id, cfg_.fb_base + static_cast<Address>(4 * scan_offset_),
                            AccessKind::Read, 1, 2);
    presenting_ = true;
  } else if (state_ == GpuState::Writing) {
    out.write = next_write();
    presenting_ = true;
  }
  return out;
}

std::vector<std::uint8_t> GpuModel::write_data(const AddressRequest& req) {
  (void)req;
  const std::size_t n = std::min<std::size_t>(4, payload_.size() - written_);
  return {payload_.begin() + static_cast<std::ptrdiff_t>(written_),
          payload_.begin() + static_cast<std::ptrdiff_t>(written_ + n)};
}

void GpuModel::take_carrier(std::uint8_t b) {
  carrier_.push_back(b);
  const std::size_t n = carrier_.size();
  if (n <= kTriggerLen) {
    if (b != cfg_.trigger[n - 1]) state_ = GpuState::Idle;
    return;
  }
  constexpr std::size_t kHeader = kTriggerLen + 6;
  if (n < kHeader) return;
  const std::size_t len = carrier_[kTriggerLen + 4] | carrier_[kTriggerLen + 5] << 8;
  if (n == kHeader + len) start_writing();
}

void GpuModel::start_writing() {
  ++commands_seen_;
  dest_ = carrier_[kTriggerLen] | carrier_[kTriggerLen + 1] << 8 |
          carrier_[kTriggerLen + 2] << 16 | static_cast<Address>(carrier_[kTriggerLen + 3]) << 24;
  payload_.assign(carrier_.begin() + kTriggerLen + 6, carrier_.end());
  written_ = 0;
  carrier_.clear();
  state_ = payload_.empty() ? GpuState::Scanning : GpuState::Writing;
}

void GpuModel::feedback(std::uint64_t, const PortFeedback& fb) {
  if (presenting_ && (fb.read_ack || fb.write_ack)) {
    presenting_ = false;
    in_flight_ = true;
  }
  for (const auto& r : fb.reads) {
    if (state_ != GpuState::Scanning) continue;
    ++reads_ok_;
    ++scan_offset_;
    take_carrier(r.data.empty() ? 0 : r.data[0]);
  }
  for (const auto& resp : fb.responses) {
    if (!resp.last) continue;
    in_flight_ = false;
    if (resp.kind == ResponseKind::DecodeError) {
      ++decode_errors_;
      state_ = GpuState::Idle;
      continue;
    }
    if (resp.channel == AccessKind::Write && state_ == GpuState::Writing) {
      const std::size_t n = std::min<std::size_t>(4, payload_.size() - written_);
      written_ += n;
      bytes_written_ += n;
      ++writes_ok_;
      if (written_ == payload_.size()) state_ = GpuState::Scanning;
    }
  }
}

}  // namespace nocf
