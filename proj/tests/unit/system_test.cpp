#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "nocf/config.hpp"
#include "nocf/system.hpp"
#include "nocf/trace.hpp"

namespace nocf {
namespace {

std::string config_path(const std::string& name) {
  return std::string(NOCF_TEST_CONFIG_DIR) + "/" + name;
}

BehaviorFactory script(std::vector<ScriptOp> ops) {
  BehaviorFactory f;
  f.make = [ops] { return std::make_unique<ScriptedMaster>(ops); };
  f.description = "script";
  f.script = ops;
  return f;
}

Topology one_port(std::vector<ScriptOp> ops, std::vector<PolicyRule> rules = {}) {
  Topology t;
  t.kernel_latency = 3;
  t.slaves.push_back({"dram", 0x80000000, 0x00100000, {}, {}});
  PortSpec p;
  p.name = "axi";
  p.initial_rules = std::move(rules);
  p.behavior = script(std::move(ops));
  t.masters.push_back({"cpu", {p}});
  t.grants.push_back({"cpu", 0x80000000, SizeCode(8), true, true});
  return t;
}

std::optional<std::uint64_t> first_transfer(const std::vector<TraceRecord>& trace) {
  for (const auto& rec : trace) {
    if (!rec.transfers.empty()) return rec.cycle;
  }
  return std::nullopt;
}

TEST(System, RunZeroCyclesIsEmpty) {
  System sys(one_port({}));
  EXPECT_TRUE(sys.run(0).trace.empty());
}

TEST(System, QuiescentSystemHasNoEvents) {
  System sys(one_port({}));
  for (int i = 0; i < 10; ++i) EXPECT_FALSE(sys.step().has_events());
}

TEST(System, PreGrantedRequestForwardsWhenPresented) {
  const auto req = make_request(1, 0x80000040, AccessKind::Read);
  System sys(one_port({{5, req, {}}}, {make_rule(0x80000000, SizeCode(8), true, true)}));
  const auto run = sys.run(20);
  EXPECT_EQ(first_transfer(run.trace), 5u);
  EXPECT_EQ(run.stats.delayed, 0u);
  EXPECT_EQ(run.stats.kernel.interrupts, 0u);
}

TEST(System, FirstTouchWaitsForKernel) {
  const auto req = make_request(1, 0x80000040, AccessKind::Read);
  System sys(one_port({{0, req, {}}}));
  const auto run = sys.run(40);
  const auto at = first_transfer(run.trace);
  ASSERT_TRUE(at);
  // Block, raise, link, kernel latency, two command words, check.
  EXPECT_GE(*at, 3u + 3u);
  EXPECT_LE(*at, 12u);
  EXPECT_EQ(run.stats.delayed, 1u);
  EXPECT_EQ(run.stats.kernel.grants, 1u);
  EXPECT_EQ(run.stats.decode_errors, 0u);
}

TEST(System, WritesLandInMemory) {
  auto req = make_request(1, 0x80000100, AccessKind::Write);
  System sys(one_port({{0, req, {0xDE, 0xAD, 0xBE, 0xEF}}}));
  sys.run(40);
  EXPECT_EQ(sys.find_slave("dram")->read_bytes(0x80000100, 4),
            (std::vector<std::uint8_t>{0xDE, 0xAD, 0xBE, 0xEF}));
}

TEST(System, UngrantedAccessGetsOneDecodeError) {
  auto req = make_request(6, 0x80200000, AccessKind::Write);
  System sys(one_port({{0, req, {}}}));
  const auto run = sys.run(40);
  EXPECT_EQ(run.stats.decode_errors, 1u);
  EXPECT_EQ(run.stats.forwards, 0u);
  EXPECT_EQ(run.stats.denials, 1u);
}

TEST(System, GrantedButUnmappedGetsFabricError) {
  Topology t = one_port({{0, make_request(2, 0x800FFFF0, AccessKind::Read), {}}});
  t.slaves[0].size = 0x1000;
  System sys(t);
  const auto run = sys.run(40);
  EXPECT_EQ(run.stats.forwards, 1u);
  EXPECT_EQ(run.stats.unrouted, 1u);
  EXPECT_EQ(run.stats.decode_errors, 1u);
}

TEST(System, OverlappingSlavesRejected) {
  Topology t = one_port({});
  t.slaves.push_back({"alias", 0x80080000, 0x1000, {}, {}});
  EXPECT_THROW(System{t}, std::invalid_argument);
}

std::string serialize(const Topology& t, std::uint64_t cycles) {
  System sys(t);
  std::ostringstream os;
  const auto stats = sys.run(cycles, [&](const TraceRecord& r) { os << trace_line(r) << '\n'; });
  os << stats_line(stats) << '\n';
  return os.str();
}

TEST(System, IdenticalConfigGivesIdenticalTrace) {
  const Topology t = load_topology(load_config_file(config_path("prototype.yaml")));
  EXPECT_EQ(serialize(t, 400), serialize(t, 400));
}

TEST(System, ConservationPerChannel) {
  const Topology t = load_topology(load_config_file(config_path("prototype.yaml")));
  System sys(t);
  const auto run = sys.run(400);
  for (const auto& p : run.stats.ports) {
    EXPECT_EQ(p.read.presented, p.read.forwards + p.read.denials + p.in_filter_read) << p.port;
    EXPECT_EQ(p.write.presented, p.write.forwards + p.write.denials + p.in_filter_write) << p.port;
  }
}

TEST(System, CommitBufferedTransfersWereApproved) {
  const Topology t = load_topology(load_config_file(config_path("prototype.yaml")));
  System sys(t);
  const auto run = sys.run(400);
  EXPECT_TRUE(unapproved_transfers(run.trace).empty());
  EXPECT_EQ(run.stats.approval_mismatches, 0u);
  EXPECT_EQ(run.stats.policy_violations, 0u);
}

TEST(ReadyPattern, Shapes) {
  const ReadyPattern every(ReadyPattern::Every{3, 1});
  EXPECT_FALSE(every(0));
  EXPECT_TRUE(every(1));
  EXPECT_TRUE(every(4));
  const ReadyPattern script(ReadyPattern::Script{{true, false}, false});
  EXPECT_TRUE(script(0));
  EXPECT_FALSE(script(1));
  EXPECT_FALSE(script(7));
  const ReadyPattern rep(ReadyPattern::Repeat{{false, true}});
  EXPECT_TRUE(rep(3));
  const ReadyPattern rnd(ReadyPattern::Random{0.5, 99});
  const ReadyPattern rnd2(ReadyPattern::Random{0.5, 99});
  int ones = 0;
  for (std::uint64_t c = 0; c < 1000; ++c) {
    EXPECT_EQ(rnd(c), rnd2(c));
    ones += rnd(c);
  }
  EXPECT_GT(ones, 400);
  EXPECT_LT(ones, 600);
}

TEST(MemorySlave, SparseBytes) {
  MemorySlave m("m", 0x1000, 0x100);
  EXPECT_EQ(m.read_byte(0x1010), 0);
  m.write_bytes(0x10FE, {1, 2});
  EXPECT_EQ(m.read_bytes(0x10FE, 2), (std::vector<std::uint8_t>{1, 2}));
  EXPECT_TRUE(m.contains(0x10FF));
  EXPECT_FALSE(m.contains(0x1100));
}

}  // namespace
}  // namespace nocf
