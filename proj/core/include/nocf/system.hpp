#pragma once

// Cycle scheduler for a whole system: master ports, one interposer per port,
// a range-routing fabric with readiness patterns, memory slaves, the word
// links, and the integrity kernel.
//
// Phase order within a cycle:
//   1. masters drive their port wires
//   2. the kernel drains interrupt words and answers due ones
//   3. each interposer consumes at most one command word and steps,
//      in port order (lower ports win fabric arbitration)
//   4. slaves accept forwarded requests and move data
//   5. feedback is delivered and registered state commits

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "nocf/bus.hpp"
#include "nocf/fifo_link.hpp"
#include "nocf/interposer.hpp"
#include "nocf/kernel.hpp"
#include "nocf/master.hpp"

namespace nocf {

/// Cycle -> ready. Random patterns are drawn from a seeded generator, so a
/// pattern is a pure function of (seed, cycle).
class ReadyPattern {
 public:
  struct Always {};
  struct Never {};
  struct Every {
    std::uint64_t period = 1;
    std::uint64_t phase = 0;
  };
  struct Repeat {
    std::vector<bool> bits;  // cycled
  };
  struct Script {
    std::vector<bool> bits;  // then `tail`
    bool tail = true;
  };
  struct Random {
    double p = 0.5;
    std::uint64_t seed = 0;
  };
  using Spec = std::variant<Always, Never, Every, Repeat, Script, Random>;

  ReadyPattern() = default;
  ReadyPattern(Spec spec) : spec_(std::move(spec)) {}

  bool operator()(std::uint64_t cycle) const;
  const Spec& spec() const { return spec_; }
  std::string describe() const;

 private:
  Spec spec_ = Always{};
};

class MemorySlave {
 public:
  MemorySlave(std::string name, Address base, std::uint64_t size, ReadyPattern ready = {});

  const std::string& name() const { return name_; }
  Address base() const { return base_; }
  std::uint64_t size() const { return size_; }
  bool contains(Address a) const { return a >= base_ && std::uint64_t{a} - base_ < size_; }
  bool ready(std::uint64_t cycle) const { return ready_(cycle); }
  const ReadyPattern& ready_pattern() const { return ready_; }

  std::uint8_t read_byte(Address a) const;
  void write_byte(Address a, std::uint8_t v);
  std::vector<std::uint8_t> read_bytes(Address a, std::size_t n) const;
  void write_bytes(Address a, const std::vector<std::uint8_t>& bytes);

 private:
  std::string name_;
  Address base_;
  std::uint64_t size_;
  ReadyPattern ready_;
  std::unordered_map<Address, std::uint8_t> bytes_;
};

struct BehaviorFactory {
  std::function<std::unique_ptr<MasterBehavior>()> make;
  std::string description = "idle";
  /// The op list, for scripted behaviours.
  std::vector<ScriptOp> script;
};

struct PortSpec {
  std::string name;
  InterposerConfig interposer;
  ReadyPattern fabric_read;
  ReadyPattern fabric_write;
  std::vector<PolicyRule> initial_rules;
  BehaviorFactory behavior;
};

struct MasterSpec {
  std::string name;
  std::vector<PortSpec> ports;
};

struct MemoryInit {
  Address addr = 0;
  std::vector<std::uint8_t> bytes;
};

struct SlaveSpec {
  std::string name;
  Address base = 0;
  std::uint64_t size = 0;
  ReadyPattern ready;
  std::vector<MemoryInit> init;
};

struct Topology {
  std::uint64_t seed = 1;
  unsigned kernel_latency = 3;
  std::size_t link_depth = 4;
  std::optional<std::vector<ScriptedReply>> kernel_script;
  std::vector<MasterSpec> masters;
  std::vector<SlaveSpec> slaves;
  std::vector<GrantEntry> grants;

  std::size_t port_count() const;
};

// ---------------------------------------------------------------------------
// Trace

struct ChannelTrace {
  ChannelState state = ChannelState::Enforce;  // after the cycle
  FilterState filter = FilterState::Idle;      // after the cycle
  PortAction live;
  std::optional<AddressRequest> committed;
  std::optional<Decision> decision;
  std::optional<AddressRequest> forwarded;
  std::optional<AddressRequest> approved;
  std::optional<Response> response;
  bool master_ack = false;
};

struct InterposerTrace {
  std::string port;  // "master.port"
  ChannelTrace r;
  ChannelTrace w;
  std::optional<FslWord> fsl_in;
  std::optional<IntrWord> fsl_out;
  bool policy_busy = false;
  std::size_t rules = 0;
};

struct TransferTrace {
  std::string port;
  std::string slave;  // empty when unmapped
  AddressRequest request;
  /// The interposer's Allow decision was made on exactly this request.
  bool approved_match = false;
  /// The rule table at forwarding time allows it.
  bool policy_allows = false;
};

struct TraceRecord {
  std::uint64_t cycle = 0;
  std::vector<InterposerTrace> interposers;
  std::vector<TransferTrace> transfers;

  bool has_events() const;
};

// ---------------------------------------------------------------------------
// Stats

struct ChannelStats {
  std::uint64_t presented = 0;
  std::uint64_t forwards = 0;
  std::uint64_t blocks = 0;    // entered the request state
  std::uint64_t delayed = 0;   // blocked, then allowed on re-check
  std::uint64_t denials = 0;   // dropped with a decode error
  std::uint64_t decode_error_beats = 0;

  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

struct PortStats {
  std::string port;
  ChannelStats read;
  ChannelStats write;
  std::uint64_t in_filter_read = 0;   // buffered at end of run
  std::uint64_t in_filter_write = 0;
  std::uint64_t desync = 0;
  std::uint64_t malformed_commands = 0;
};

struct SimStats {
  std::uint64_t cycles = 0;
  std::uint64_t forwards = 0;
  std::uint64_t denials = 0;
  std::uint64_t delayed = 0;
  std::uint64_t decode_errors = 0;  // transaction-level, interposer and fabric
  std::uint64_t unrouted = 0;
  std::uint64_t policy_violations = 0;   // forwarded while the table denies
  std::uint64_t approval_mismatches = 0; // forwarded != approved request
  std::vector<PortStats> ports;
  KernelStats kernel;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  SimStats stats;
};

class System {
 public:
  /// Throws std::invalid_argument on an invalid topology.
  explicit System(const Topology& topo);

  std::uint64_t cycle() const { return cycle_; }

  TraceRecord step();
  RunResult run(std::uint64_t n_cycles);
  /// Streams records to `sink` instead of keeping them.
  SimStats run(std::uint64_t n_cycles, const std::function<void(const TraceRecord&)>& sink);

  SimStats stats() const;

  std::size_t port_count() const { return ports_.size(); }
  const Interposer& interposer(std::size_t port) const { return ports_.at(port).ip; }
  const std::string& port_name(std::size_t port) const { return ports_.at(port).name; }
  const std::string& port_master(std::size_t port) const { return ports_.at(port).master; }
  std::optional<std::size_t> find_port(const std::string& qualified) const;
  MasterBehavior& behavior(std::size_t port) { return *ports_.at(port).behavior; }

  const MemorySlave* find_slave(const std::string& name) const;
  MemorySlave* find_slave(const std::string& name);
  const std::vector<MemorySlave>& slaves() const { return slaves_; }
  const IntegrityKernel& kernel() const { return kernel_; }

 private:
  struct Port {
    std::string master;
    std::string name;  // "master.port"
    Interposer ip;
    ReadyPattern fabric_read;
    ReadyPattern fabric_write;
    std::unique_ptr<MasterBehavior> behavior;
    ChannelStats read_stats;
    ChannelStats write_stats;
  };

  MemorySlave* route(Address a);

  std::uint64_t cycle_ = 0;
  std::vector<Port> ports_;
  std::vector<MemorySlave> slaves_;
  std::vector<FifoLink<IntrWord>> uplinks_;
  std::vector<FifoLink<FslWord>> downlinks_;
  IntegrityKernel kernel_;
  std::uint64_t decode_errors_ = 0;
  std::uint64_t unrouted_ = 0;
  std::uint64_t policy_violations_ = 0;
  std::uint64_t approval_mismatches_ = 0;
};

/// Post-hoc check over a trace: every transfer a slave accepted was
/// Allow-decided on exactly that request. Returns the offending transfers.
std::vector<std::pair<std::uint64_t, TransferTrace>> unapproved_transfers(
    const std::vector<TraceRecord>& trace);

}  // namespace nocf
