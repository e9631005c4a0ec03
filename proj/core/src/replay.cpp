#include "nocf/replay.hpp"

#include <sstream>

namespace nocf {

namespace {

constexpr const char* kMaster = "attacker";

std::string show(const std::optional<AddressRequest>& r) { return r ? to_string(*r) : "none"; }

}  // namespace

Topology replay_topology(const Counterexample& cx, const CheckConfig& cfg) {
  Topology topo;
  topo.link_depth = cfg.link_depth;
  std::vector<ScriptedReply> script;
  std::vector<MasterOutput> wires;
  std::vector<bool> ready_r, ready_w;
  for (const auto& s : cx.steps) {
    if (s.label.kernel == KernelAction::Grant || s.label.kernel == KernelAction::Deny) {
      script.push_back({s.cycle, 0, s.label.kernel == KernelAction::Grant});
    }
    wires.push_back(MasterOutput{s.wires[0], s.wires[1]});
    ready_r.push_back(s.label.ready[0]);
    ready_w.push_back(s.label.ready[1]);
  }
  topo.kernel_script = std::move(script);

  PortSpec port;
  port.name = "p0";
  port.interposer.capacity = cfg.capacity;
  port.interposer.variant = cfg.variant;
  port.interposer.register_slice = cfg.register_slice;
  port.fabric_read = ReadyPattern(ReadyPattern::Script{ready_r, false});
  port.fabric_write = ReadyPattern(ReadyPattern::Script{ready_w, false});
  port.initial_rules = cfg.rules;
  port.behavior = {[wires] { return std::make_unique<WireScriptMaster>(wires); }, "replay", {}};
  topo.masters.push_back(MasterSpec{kMaster, {std::move(port)}});
  return topo;
}

ReplayResult replay(const Counterexample& cx, const CheckConfig& cfg) {
  ReplayResult res;
  System sys(replay_topology(cx, cfg));
  for (std::size_t c = 0; c < cx.steps.size(); ++c) {
    TraceRecord rec = sys.step();
    const CxStep& want = cx.steps[c];
    const InterposerTrace& got = rec.interposers.at(0);

    if (!res.divergence) {
      std::ostringstream why;
      for (AccessKind k : {AccessKind::Read, AccessKind::Write}) {
        const std::size_t i = k == AccessKind::Read ? 0 : 1;
        const ChannelTrace& ch = k == AccessKind::Read ? got.r : got.w;
        const char* tag = k == AccessKind::Read ? "read" : "write";
        if (!cfg.register_slice && ch.live != want.wires[i]) {
          why << tag << " wires " << show(ch.live) << " vs " << show(want.wires[i]) << "; ";
        }
        if (ch.state != want.channel_state[i]) {
          why << tag << " state " << to_string(ch.state) << " vs "
              << to_string(want.channel_state[i]) << "; ";
        }
        if (ch.filter != want.filter_state[i]) {
          why << tag << " filter " << to_string(ch.filter) << " vs "
              << to_string(want.filter_state[i]) << "; ";
        }
        if (ch.forwarded != want.forwarded[i]) {
          why << tag << " forwarded " << show(ch.forwarded) << " vs " << show(want.forwarded[i])
              << "; ";
        }
      }
      if (got.fsl_out != want.intr) why << "interrupt word differs; ";
      if (got.rules != want.rules) why << "rule count " << got.rules << " vs " << want.rules << "; ";
      if (!why.str().empty()) {
        res.divergence = c;
        res.divergence_detail = why.str();
      }
    }

    for (const auto& tr : rec.transfers) {
      const bool bad = cfg.mode == CheckMode::Strict ? !tr.approved_match : !tr.policy_allows;
      if (bad) {
        res.violation_cycles.push_back(c);
        break;
      }
    }
    res.trace.push_back(std::move(rec));
  }

  if (cx.violation && !res.divergence && !cx.steps.empty()) {
    const std::uint64_t last = cx.steps.size() - 1;
    bool match = false;
    for (const auto& tr : res.trace.back().transfers) {
      if (tr.request == cx.violation->forwarded && tr.request.kind == cx.violation->channel) {
        match = cfg.mode == CheckMode::Strict ? !tr.approved_match : !tr.policy_allows;
      }
    }
    res.reproduced = match && res.violation_cycles.size() == 1 && res.violation_cycles[0] == last;
  }
  return res;
}

}  // namespace nocf
