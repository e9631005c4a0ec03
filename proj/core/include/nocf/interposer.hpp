#pragma once

// The interposer sitting between one master port and the NoC: a shared rule
// table, one channel controller per address channel (each owning an address
// filter), and the word link to the integrity core.
//
// All step functions are deterministic: same state and inputs, same result.
// The model checker drives exactly these functions, so any behavioural change
// here is observed by both the simulator and the checker.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "nocf/bus.hpp"
#include "nocf/codec.hpp"
#include "nocf/policy.hpp"

namespace nocf {

enum class FilterState : std::uint8_t { Idle, Committed, Waiting };

/// Vulnerable forwards the master's live wires once the fabric becomes ready
/// after an approval; CommitBuffered forwards the request that was checked.
enum class FilterVariant : std::uint8_t { Vulnerable, CommitBuffered };

struct AddressFilter {
  FilterState state = FilterState::Idle;
  PortAction live_request;
  std::optional<AddressRequest> committed_request;
  bool pulse_committed_valid = false;
  bool pulse_forwarded = false;
  bool pulse_policy_compliant = false;
  FilterVariant variant = FilterVariant::CommitBuffered;

  /// The request awaiting a decision this cycle: the master's wires while
  /// idle, the buffered request while committed, nothing while waiting.
  PortAction pending_request(const PortAction& master) const;

  /// What the filter drives towards the fabric if it forwards this cycle.
  PortAction output_wires(const PortAction& master) const;

  /// Behavioural state only (pulses and live wires are per-cycle).
  bool same_registers(const AddressFilter& o) const {
    return state == o.state && committed_request == o.committed_request && variant == o.variant;
  }
  friend bool operator==(const AddressFilter&, const AddressFilter&) = default;
};

struct FilterStep {
  AddressFilter filter;
  std::optional<AddressRequest> forwarded;
  /// The request the forwarding Allow decision was made on. Differs from
  /// `forwarded` only when the master swapped its wires after approval.
  std::optional<AddressRequest> approved;
  /// The master's request was consumed this cycle (forwarded or dropped).
  bool master_ack = false;
  bool dropped = false;
};

FilterStep filter_step(AddressFilter f, const PortAction& master, bool fabric_ready,
                       std::optional<Decision> decision);

enum class ChannelState : std::uint8_t { Permit, Enforce, Request, Wait, Check, Respond, Resume };

struct ChannelController {
  ChannelState state = ChannelState::Enforce;
  AddressFilter filter;
  AccessKind kind = AccessKind::Read;
  std::optional<std::uint8_t> saved_id;
  std::optional<std::uint8_t> saved_len;
  unsigned respond_beats_left = 0;

  friend bool operator==(const ChannelController&, const ChannelController&) = default;
};

ChannelController make_channel(AccessKind kind, FilterVariant variant);

struct ChannelInputs {
  PortAction master;
  bool fabric_ready = false;
  /// An enforce command for this channel was consumed this cycle.
  bool enforce_cmd = false;
  bool policy_busy = false;
  /// The outgoing link will accept a word from this channel this cycle.
  bool fsl_out_grant = true;
};

struct ChannelStep {
  ChannelController channel;
  FilterStep filter;
  /// Decision delivered to the filter this cycle, if any.
  std::optional<Decision> decision;
  /// Raw table verdict on the pending request, when one was evaluated.
  std::optional<Decision> evaluated;
  std::optional<IntrWord> intr;
  std::optional<Response> response;
  bool desync = false;
  /// Blocked request was re-checked and allowed.
  bool resumed_allow = false;
};

ChannelStep channel_step(ChannelController c, const RuleTable& table, const ChannelInputs& in);

struct InterposerConfig {
  std::size_t capacity = 2;
  FilterVariant variant = FilterVariant::CommitBuffered;
  /// One-entry register slice on each address channel input.
  bool register_slice = false;
  /// Start both channels in the debug Permit state.
  bool permit_mode = false;
};

struct InterposerInputs {
  PortAction master_r;
  PortAction master_w;
  bool fabric_ready_r = false;
  bool fabric_ready_w = false;
  std::optional<FslWord> fsl_in;
  bool fsl_out_space = true;
};

struct ChannelReport {
  ChannelState state_before = ChannelState::Enforce;
  FilterState filter_before = FilterState::Idle;
  PortAction live;  // what the filter saw on its input this cycle
  std::optional<Decision> decision;
  std::optional<Decision> evaluated;
  std::optional<AddressRequest> forwarded;
  std::optional<AddressRequest> approved;
  std::optional<Response> response;
  bool master_ack = false;
  bool dropped = false;
  bool resumed_allow = false;
  bool desync = false;
};

struct InterposerOutputs {
  ChannelReport r;
  ChannelReport w;
  std::optional<IntrWord> fsl_out;
  std::optional<Command> command;
  bool policy_busy = false;
  bool malformed_command = false;

  const ChannelReport& channel(AccessKind k) const { return k == AccessKind::Read ? r : w; }
};

struct Interposer {
  RuleTable table;
  ChannelController read;
  ChannelController write;
  bool register_slice = false;
  std::optional<AddressRequest> slice_r;
  std::optional<AddressRequest> slice_w;
  // Diagnostics; not part of the behavioural state.
  std::uint64_t desync_count = 0;
  std::uint64_t malformed_count = 0;

  explicit Interposer(const InterposerConfig& cfg = {});

  const ChannelController& channel(AccessKind k) const {
    return k == AccessKind::Read ? read : write;
  }

  /// Request the given channel drives towards the fabric this cycle if it
  /// forwards, given what the master presents. Used to route readiness.
  PortAction fabric_request(AccessKind k, const PortAction& master) const;

  InterposerOutputs step(const InterposerInputs& in);
};

struct InterposerCycle {
  Interposer next;
  InterposerOutputs out;
};

InterposerCycle interposer_cycle(Interposer ip, const InterposerInputs& in);

std::string_view to_string(FilterState s);
std::string_view to_string(FilterVariant v);
std::string_view to_string(ChannelState s);
std::optional<FilterVariant> parse_filter_variant(std::string_view text);

}  // namespace nocf
