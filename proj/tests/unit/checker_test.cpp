#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "nocf/checker.hpp"
#include "nocf/replay.hpp"

namespace nocf {
namespace {

std::string config_path(const std::string& name) {
  return std::string(NOCF_TEST_CONFIG_DIR) + "/" + name;
}

CheckConfig vulnerable(std::uint64_t depth = 6) {
  CheckConfig c;
  c.variant = FilterVariant::Vulnerable;
  c.depth = depth;
  return c;
}

AttackDomain domain_of(const CheckConfig& c) {
  RuleTable ref(c.capacity);
  for (const auto& r : c.rules) ref.insert(r);
  return AttackDomain(c.domain, ref);
}

TEST(Successors, QuiescentStateAgreesWithBruteForce) {
  const CheckConfig cfg = vulnerable();
  const AttackDomain dom = domain_of(cfg);
  const AbstractState s0 = initial_state(cfg);

  std::set<std::string> keys;
  const AttackChoice choices[] = {AttackChoice::NoRequest, AttackChoice::Permissible,
                                  AttackChoice::Impermissible};
  for (auto cr : choices)
    for (auto cw : choices)
      for (bool rr : {false, true})
        for (bool rw : {false, true})
          for (auto k : {KernelAction::None, KernelAction::Wait, KernelAction::Grant,
                         KernelAction::Deny}) {
            StepLabel l;
            l.choice = {cr, cw};
            l.ready = {rr, rw};
            l.kernel = k;
            if (auto t = apply_label(s0, l, cfg, dom)) keys.insert(t->next.key());
          }

  const auto succ = successors(s0, cfg, dom);
  EXPECT_GE(succ.size(), 6u);
  EXPECT_EQ(succ.size(), keys.size());
  std::set<std::string> seen;
  for (const auto& t : succ) {
    EXPECT_TRUE(seen.insert(t.next.key()).second);
    EXPECT_EQ(t.label.kernel, KernelAction::None);
  }
}

TEST(Successors, KernelRepliesNeedPendingInterrupt) {
  const CheckConfig cfg = vulnerable();
  StepLabel l;
  l.kernel = KernelAction::Grant;
  EXPECT_FALSE(apply_label(initial_state(cfg), l, cfg, domain_of(cfg)));
}

TEST(Successors, DisabledChannelStaysQuiet) {
  CheckConfig cfg = vulnerable();
  cfg.attack_read = false;
  const AttackDomain dom = domain_of(cfg);
  for (const auto& t : successors(initial_state(cfg), cfg, dom)) {
    EXPECT_FALSE(t.wires[0]);
  }
}

TEST(Check, VulnerableFindsSwap) {
  const auto r = check(vulnerable());
  ASSERT_TRUE(r.violated());
  const auto& cx = r.counterexample();
  EXPECT_LE(cx.depth(), 6u);
  EXPECT_TRUE(is_wait_state_swap(cx));
  ASSERT_TRUE(cx.violation);
  EXPECT_NE(cx.violation->forwarded, *cx.violation->approved);
}

TEST(Check, CounterexampleIsMinimal) {
  const auto r = check(vulnerable());
  ASSERT_TRUE(r.violated());
  const auto shallower = check(vulnerable(r.counterexample().depth() - 1));
  EXPECT_TRUE(shallower.verified());
}

TEST(Check, CommitBufferedVerifiesAndIsMonotone) {
  CheckConfig cfg;
  cfg.variant = FilterVariant::CommitBuffered;
  for (std::uint64_t d = 0; d <= 8; ++d) {
    cfg.depth = d;
    const auto r = check(cfg);
    ASSERT_TRUE(r.verified()) << d;
    EXPECT_EQ(std::get<Verified>(r.verdict).depth, d);
  }
}

TEST(Check, HoldingAttackerCannotSwap) {
  CheckConfig cfg = vulnerable(8);
  cfg.may_mutate = false;
  EXPECT_TRUE(check(cfg).verified());
}

TEST(Check, StateLimitGivesInconclusive) {
  CheckConfig cfg;
  cfg.variant = FilterVariant::CommitBuffered;
  cfg.depth = 8;
  cfg.state_limit = 20;
  const auto r = check(cfg);
  ASSERT_TRUE(r.inconclusive());
  EXPECT_EQ(std::get<Inconclusive>(r.verdict).limit, 20u);
}

TEST(Check, ThreadCountDoesNotChangeResult) {
  for (auto variant : {FilterVariant::Vulnerable, FilterVariant::CommitBuffered}) {
    CheckConfig a;
    a.variant = variant;
    a.depth = 8;
    CheckConfig b = a;
    b.threads = 3;
    const auto ra = check(a), rb = check(b);
    EXPECT_EQ(ra.verdict.index(), rb.verdict.index());
    EXPECT_EQ(ra.stats.states, rb.stats.states);
    if (ra.violated()) {
      EXPECT_EQ(ra.counterexample().labels(), rb.counterexample().labels());
    }
  }
}

TEST(Check, PolicyModeSeesRuleReplacement) {
  CheckConfig cfg;
  cfg.variant = FilterVariant::CommitBuffered;
  cfg.depth = 10;
  cfg.mode = CheckMode::Policy;
  const auto r = check(cfg);
  ASSERT_TRUE(r.violated());
  EXPECT_EQ(r.counterexample().violation->invariant, "policy");
}

TEST(Check, ValidateRejectsOneSidedDomain) {
  CheckConfig cfg;
  cfg.domain = {0x80000000, 0x80000100};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = CheckConfig{};
  cfg.kernel_max_delay = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Check, LoadsPackagedConfig) {
  const CheckConfig cfg = load_check_config(load_config_file(config_path("check_vulnerable.yaml")));
  EXPECT_EQ(cfg.variant, FilterVariant::Vulnerable);
  EXPECT_EQ(cfg.depth, 6u);
  EXPECT_EQ(cfg.domain, (std::vector<Address>{0x80000000, 0x90000000}));
}

TEST(Check, StructuredReportIsLineDelimited) {
  const CheckConfig cfg = vulnerable();
  const auto r = check(cfg);
  std::istringstream in(report_structured(cfg, r));
  std::string line;
  std::getline(in, line);
  EXPECT_NE(line.find("\"type\":\"check\""), std::string::npos);
  std::size_t steps = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find("\"type\":\"step\""), std::string::npos);
    ++steps;
  }
  EXPECT_EQ(steps, r.counterexample().depth());
}

TEST(Replay, ViolationReproducesInSimulator) {
  const CheckConfig cfg = vulnerable();
  const auto r = check(cfg);
  ASSERT_TRUE(r.violated());
  const auto rep = replay(r.counterexample(), cfg);
  EXPECT_FALSE(rep.divergence) << rep.divergence_detail;
  EXPECT_TRUE(rep.reproduced);
  EXPECT_EQ(rep.violation_cycles,
            (std::vector<std::uint64_t>{r.counterexample().depth() - 1}));
}

TEST(Replay, PrefixWithoutSwapIsClean) {
  const CheckConfig cfg = vulnerable();
  const auto r = check(cfg);
  ASSERT_TRUE(r.violated());
  auto labels = r.counterexample().labels();
  labels.pop_back();
  const Counterexample prefix = expand_labels(labels, cfg);
  EXPECT_FALSE(prefix.violation);
  const auto rep = replay(prefix, cfg);
  EXPECT_FALSE(rep.divergence) << rep.divergence_detail;
  EXPECT_TRUE(rep.violation_cycles.empty());
  EXPECT_FALSE(rep.reproduced);
}

TEST(Replay, EmptyCounterexampleGivesEmptyTrace) {
  EXPECT_TRUE(replay(Counterexample{}, vulnerable()).trace.empty());
}

}  // namespace
}  // namespace nocf
