#pragma once

// Packaged end-to-end scenarios.
//
// gpu: a malicious GPU scans a framebuffer whose pixels hide two write
// commands (a 20-byte hook over unused error-handling code and a 360-byte
// routine in an unused kernel region). Run once with a policy that grants
// the GPU all of memory and once with a policy that limits it to its
// framebuffer.
//
// isolation: scripted masters with disjoint grant maps, some of whose ops
// probe another master's memory.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nocf/adversary.hpp"
#include "nocf/config.hpp"
#include "nocf/system.hpp"

namespace nocf {

enum class GpuPolicy : std::uint8_t { Restricted, Permissive };
std::string_view to_string(GpuPolicy p);
std::optional<GpuPolicy> parse_gpu_policy(std::string_view text);

struct GpuScenarioParams {
  std::uint64_t seed = 7;
  std::uint64_t cycles = 20000;
  GpuPolicy policy = GpuPolicy::Restricted;
  FilterVariant variant = FilterVariant::CommitBuffered;
  unsigned kernel_latency = 3;
  std::size_t gpu_capacity = 4;

  Address dram_base = 0x80000000u;
  std::uint64_t dram_size = 0x01000000u;  // 16 MiB
  /// Kernel image owned by the CPU; the region whose bytes must not change.
  Address victim_base = 0x80000000u;
  std::uint64_t victim_size = 0x00100000u;
  Address hook_addr = 0x80012340u;
  std::size_t hook_len = 20;
  Address payload_addr = 0x800F0000u;
  std::size_t payload_len = 360;
  Address fb_base = 0x80400000u;
  std::size_t fb_pixels = 1024;
  std::uint64_t gpu_start = 4;
};

/// Reads the `scenario` section. Throws ConfigError.
GpuScenarioParams load_gpu_params(const ConfigDocument& doc);

/// What an attacker would plant: the hook bytes and the main routine.
struct KeyloggerImage {
  Address hook_addr = 0;
  std::vector<std::uint8_t> hook;
  Address payload_addr = 0;
  std::vector<std::uint8_t> payload;
};

KeyloggerImage keylogger_image(const GpuScenarioParams& p);
/// Framebuffer with seeded pixel noise and both commands embedded.
Framebuffer gpu_framebuffer(const GpuScenarioParams& p, const KeyloggerImage& img);
Topology gpu_topology(const GpuScenarioParams& p);

/// True when both the hook and the routine sit in memory exactly.
bool keylogger_injected(const MemorySlave& mem, const KeyloggerImage& img);

struct GpuScenarioResult {
  SimStats stats;
  bool injected_before = false;
  bool injected = false;
  bool victim_unchanged = false;
  std::uint64_t fb_reads_ok = 0;
  std::uint64_t fb_read_errors = 0;
  std::uint64_t gpu_read_forwards = 0;
  std::uint64_t gpu_read_unapproved = 0;  // read transfers not Allow-decided
  std::uint64_t gpu_writes_ok = 0;
  std::uint64_t gpu_write_errors = 0;
  std::uint64_t bytes_landed = 0;          // payload bytes matching at their destination
  std::uint64_t commands_seen = 0;
  std::uint64_t cycles = 0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

GpuScenarioResult run_gpu_scenario(const GpuScenarioParams& p, const TraceSink& sink = {});

struct IsolationParams {
  std::uint64_t cycles = 2000;
};

IsolationParams load_isolation_params(const ConfigDocument& doc);

struct ProbeOutcome {
  std::string port;
  std::size_t op = 0;           // index in that port's script
  AddressRequest request;
  std::uint64_t decode_errors = 0;  // final DecodeError responses carrying the probe's id
  std::uint64_t other_responses = 0;
};

struct IsolationResult {
  SimStats stats;
  std::uint64_t cross_boundary_forwards = 0;
  std::uint64_t in_bounds_decode_errors = 0;
  std::uint64_t in_bounds_ops = 0;
  std::uint64_t in_bounds_completed = 0;
  std::uint64_t first_touch_regions = 0;
  std::vector<ProbeOutcome> probes;
};

/// Runs a topology whose masters use scripted behaviours. Ops that the
/// master's grant map does not permit are treated as probes.
IsolationResult run_isolation_scenario(const ConfigDocument& doc, const IsolationParams& p,
                                       const TraceSink& sink = {});

std::string gpu_report_text(const GpuScenarioParams& p, const GpuScenarioResult& r);
std::string gpu_report_line(const GpuScenarioParams& p, const GpuScenarioResult& r);
std::string isolation_report_text(const IsolationResult& r);
std::string isolation_report_line(const IsolationResult& r);

}  // namespace nocf
