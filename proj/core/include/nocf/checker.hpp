#pragma once

// Bounded breadth-first search over one interposer, a per-cycle attacker on
// each address channel, nondeterministic fabric readiness and an abstract
// kernel that grants or denies each interrupt within a bounded delay.
//
// Successor states are computed by Interposer::step itself; nothing in here
// re-implements the filter or channel state machines.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nocf/adversary.hpp"
#include "nocf/config.hpp"
#include "nocf/interposer.hpp"

namespace nocf {

enum class CheckMode : std::uint8_t {
  /// Forwarded request must equal the request the Allow decision was made on.
  Strict,
  /// Forwarded request must be allowed by the table in the forwarding cycle.
  Policy,
};

struct CheckConfig {
  FilterVariant variant = FilterVariant::Vulnerable;
  std::size_t capacity = 2;
  bool register_slice = false;
  std::uint64_t depth = 6;
  std::vector<Address> domain = {0x80000000u, 0x90000000u};
  /// Reference policy: splits the domain and seeds the interposer table.
  std::vector<PolicyRule> rules = {PolicyRule{0x80000000u, SizeCode(8), true, true, 0}};
  /// Latest cycle (1-based, counted from the interrupt) the kernel may reply in.
  unsigned kernel_max_delay = 3;
  std::size_t link_depth = 4;
  /// The attacker may change an unacknowledged request.
  bool may_mutate = true;
  bool attack_read = true;
  bool attack_write = true;
  CheckMode mode = CheckMode::Strict;
  std::uint64_t state_limit = 10'000'000;
  unsigned threads = 1;
};

/// Reads the `check` section. Throws ConfigError with located messages.
CheckConfig load_check_config(const ConfigDocument& doc);
/// Throws ConfigError when the configuration cannot be searched (empty
/// domain side, delay 0, capacity 0, and so on).
void validate(const CheckConfig& cfg);

std::string_view to_string(CheckMode m);

enum class KernelAction : std::uint8_t { None, Wait, Grant, Deny };
std::string_view to_string(KernelAction a);

struct PendingIntr {
  IntrWord word;
  unsigned age = 0;  // cycles since the kernel picked it up
  friend bool operator==(const PendingIntr&, const PendingIntr&) = default;
};

struct AbstractState {
  Interposer ip;
  std::array<AttackerPort, 2> attacker;  // indexed by AccessKind
  std::vector<IntrWord> uplink;
  std::vector<PendingIntr> kernel;
  std::vector<FslWord> downlink;

  /// Canonical encoding: per-cycle wires, pulses and diagnostic counters are
  /// excluded and rule ages are renumbered.
  std::string key() const;
};

AbstractState initial_state(const CheckConfig& cfg);

/// Nondeterministic choices made in one cycle.
struct StepLabel {
  std::array<AttackChoice, 2> choice{AttackChoice::NoRequest, AttackChoice::NoRequest};
  std::array<std::uint8_t, 2> index{0, 0};
  std::array<bool, 2> ready{false, false};
  KernelAction kernel = KernelAction::None;
  friend bool operator==(const StepLabel&, const StepLabel&) = default;
};

struct Violation {
  AccessKind channel = AccessKind::Read;
  AddressRequest forwarded;
  std::optional<AddressRequest> approved;
  bool table_allows = false;
  std::string invariant;  // "strict" or "policy"
};

struct Transition {
  StepLabel label;
  AbstractState next;
  std::array<PortAction, 2> wires;
  InterposerOutputs out;
  std::optional<Violation> violation;
};

/// Applies one labelled cycle. Returns nullopt when the label is not
/// available from `s` (for example a kernel reply with nothing pending).
std::optional<Transition> apply_label(const AbstractState& s, const StepLabel& label,
                                      const CheckConfig& cfg, const AttackDomain& domain);

/// All distinct successors of `s`, first label wins on duplicates.
std::vector<Transition> successors(const AbstractState& s, const CheckConfig& cfg,
                                   const AttackDomain& domain);

struct CxStep {
  std::uint64_t cycle = 0;
  StepLabel label;
  std::array<PortAction, 2> wires;
  std::array<ChannelState, 2> channel_state{};
  std::array<FilterState, 2> filter_state{};
  std::array<std::optional<Decision>, 2> decision;
  std::array<std::optional<AddressRequest>, 2> forwarded;
  std::array<std::optional<AddressRequest>, 2> approved;
  std::optional<IntrWord> intr;
  std::optional<FslWord> command;
  std::size_t rules = 0;
};

struct Counterexample {
  std::vector<CxStep> steps;
  /// Present on counterexamples produced by check(); absent for prefixes.
  std::optional<Violation> violation;

  std::size_t depth() const { return steps.size(); }
  std::vector<StepLabel> labels() const;
};

/// Re-derives the full step records for a label sequence.
Counterexample expand_labels(const std::vector<StepLabel>& labels, const CheckConfig& cfg);

struct CheckStats {
  std::uint64_t states = 0;       // distinct canonical states visited
  std::uint64_t transitions = 0;  // successors generated
  std::uint64_t depth_reached = 0;
  bool fixpoint = false;          // frontier emptied before the bound
  double seconds = 0.0;
};

struct Verified {
  std::uint64_t depth = 0;
};
struct Inconclusive {
  std::uint64_t limit = 0;
  std::uint64_t depth = 0;  // last fully explored depth
};

using CheckVerdict = std::variant<Verified, Counterexample, Inconclusive>;

struct CheckResult {
  CheckVerdict verdict;
  CheckStats stats;

  bool verified() const { return std::holds_alternative<Verified>(verdict); }
  bool violated() const { return std::holds_alternative<Counterexample>(verdict); }
  bool inconclusive() const { return std::holds_alternative<Inconclusive>(verdict); }
  const Counterexample& counterexample() const { return std::get<Counterexample>(verdict); }
};

CheckResult check(const CheckConfig& cfg);

/// True when the steps show an approval given while the fabric was not
/// ready, followed by the attacker switching to a denied address and that
/// address being forwarded.
bool is_wait_state_swap(const Counterexample& cx);

std::string describe(const CheckConfig& cfg);
std::string report_text(const CheckConfig& cfg, const CheckResult& r);
/// Line-delimited JSON: one "check" summary line, then one "step" line per
/// counterexample step.
std::string report_structured(const CheckConfig& cfg, const CheckResult& r);

}  // namespace nocf
