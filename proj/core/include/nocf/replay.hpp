#pragma once

// Drives the full system simulator with the choices recorded in a checker
// counterexample and compares the two executions cycle by cycle.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nocf/checker.hpp"
#include "nocf/system.hpp"

namespace nocf {

/// One master, one port and one interposer configured as the checker's,
/// with the attacker's wires, fabric readiness and kernel replies scripted
/// from the counterexample.
Topology replay_topology(const Counterexample& cx, const CheckConfig& cfg);

struct ReplayResult {
  std::vector<TraceRecord> trace;
  /// First cycle at which the simulator disagrees with the checker.
  std::optional<std::uint64_t> divergence;
  std::string divergence_detail;
  /// Cycles in which the simulator forwarded a request that breaks the
  /// checked invariant.
  std::vector<std::uint64_t> violation_cycles;
  /// The counterexample's violation shows up in the simulator at the same
  /// cycle, on the same channel, with the same request, and nowhere earlier.
  bool reproduced = false;
};

ReplayResult replay(const Counterexample& cx, const CheckConfig& cfg);

}  // namespace nocf
