#include "nocf/checker.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include "nocf/kernel.hpp"
#include "nocf/trace.hpp"

namespace nocf {

namespace {

constexpr std::size_t idx(AccessKind k) { return k == AccessKind::Read ? 0 : 1; }
constexpr AccessKind kKinds[2] = {AccessKind::Read, AccessKind::Write};

bool attacked(const CheckConfig& cfg, AccessKind k) {
  return k == AccessKind::Read ? cfg.attack_read : cfg.attack_write;
}

std::vector<AccessKind> attacked_kinds(const CheckConfig& cfg) {
  std::vector<AccessKind> v;
  for (AccessKind k : kKinds) {
    if (attacked(cfg, k)) v.push_back(k);
  }
  return v;
}

RuleTable reference_table(const CheckConfig& cfg) {
  RuleTable t(std::max<std::size_t>(cfg.rules.size(), 1));
  for (const auto& r : cfg.rules) t.insert(r);
  return t;
}

AttackDomain make_domain(const CheckConfig& cfg) {
  return AttackDomain(cfg.domain, reference_table(cfg), attacked_kinds(cfg));
}

// Key encoding helpers: fixed-width little-endian appends.
struct KeyWriter {
  std::string s;
  void u8(std::uint8_t v) { s.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void req(const std::optional<AddressRequest>& r) {
    if (!r) {
      u8(0xFF);
      return;
    }
    u8(r->id);
    u32(r->addr);
    u8(static_cast<std::uint8_t>(r->kind));
    u8(r->burst_len);
    u8(r->burst_size_log2);
    u8(static_cast<std::uint8_t>(r->burst_type));
  }
  void opt8(const std::optional<std::uint8_t>& v) {
    u8(v ? 1 : 0);
    u8(v.value_or(0));
  }
  void channel(const ChannelController& c) {
    u8(static_cast<std::uint8_t>(c.state));
    u8(static_cast<std::uint8_t>(c.filter.state));
    req(c.filter.committed_request);
    opt8(c.saved_id);
    opt8(c.saved_len);
    u8(static_cast<std::uint8_t>(c.respond_beats_left));
  }
};

}  // namespace

std::string_view to_string(CheckMode m) { return m == CheckMode::Strict ? "strict" : "policy"; }

std::string_view to_string(KernelAction a) {
  switch (a) {
    case KernelAction::None: return "none";
    case KernelAction::Wait: return "wait";
    case KernelAction::Grant: return "grant";
    case KernelAction::Deny: return "deny";
  }
  return "?";
}

std::string AbstractState::key() const {
  KeyWriter w;
  const RuleTable t = ip.table.normalized();
  w.u8(static_cast<std::uint8_t>(t.size()));
  for (const auto& r : t.rules()) {
    w.u32(r.base);
    w.u8(static_cast<std::uint8_t>(r.size.code() | (r.allow_read ? 0x10 : 0) |
                                   (r.allow_write ? 0x20 : 0)));
  }
  w.channel(ip.read);
  w.channel(ip.write);
  w.req(ip.slice_r);
  w.req(ip.slice_w);
  for (const auto& a : attacker) w.req(a.outstanding);
  w.u8(static_cast<std::uint8_t>(uplink.size()));
  for (auto x : uplink) w.u32(x.raw);
  w.u8(static_cast<std::uint8_t>(kernel.size()));
  for (const auto& p : kernel) {
    w.u32(p.word.raw);
    w.u8(static_cast<std::uint8_t>(p.age));
  }
  w.u8(static_cast<std::uint8_t>(downlink.size()));
  for (auto x : downlink) w.u32(x.raw);
  return std::move(w.s);
}

AbstractState initial_state(const CheckConfig& cfg) {
  InterposerConfig ic;
  ic.capacity = cfg.capacity;
  ic.variant = cfg.variant;
  ic.register_slice = cfg.register_slice;
  AbstractState s{Interposer(ic), {}, {}, {}, {}};
  for (const auto& r : cfg.rules) s.ip.table.insert(r);
  return s;
}

std::optional<Transition> apply_label(const AbstractState& s, const StepLabel& label,
                                      const CheckConfig& cfg, const AttackDomain& domain) {
  Transition t;
  t.label = label;
  t.next = s;
  AbstractState& n = t.next;

  // 1. attacker wires
  for (AccessKind k : kKinds) {
    const std::size_t i = idx(k);
    if (!attacked(cfg, k)) {
      if (label.choice[i] != AttackChoice::NoRequest) return std::nullopt;
      continue;
    }
    bool found = false;
    for (const auto& m : attacker_moves(s.attacker[i], cfg.may_mutate, domain, k, 0)) {
      if (m.choice == label.choice[i] && m.index == label.index[i]) {
        t.wires[i] = m.wires;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }

  // 2. kernel: age what it holds, pick up one word, then act on the oldest
  for (auto& p : n.kernel) ++p.age;
  if (!n.uplink.empty()) {
    n.kernel.push_back(PendingIntr{n.uplink.front(), 0});
    n.uplink.erase(n.uplink.begin());
  }
  if (n.kernel.empty()) {
    if (label.kernel != KernelAction::None) return std::nullopt;
  } else {
    const PendingIntr& front = n.kernel.front();
    const bool can_reply = n.downlink.size() + 2 <= cfg.link_depth;
    const bool can_wait = front.age + 1 < cfg.kernel_max_delay || !can_reply;
    switch (label.kernel) {
      case KernelAction::None:
        return std::nullopt;
      case KernelAction::Wait:
        if (!can_wait) return std::nullopt;
        break;
      case KernelAction::Grant:
      case KernelAction::Deny: {
        if (!can_reply) return std::nullopt;
        const IntrInfo info = decode_intr(front.word);
        for (FslWord w : abstract_reply(info, label.kernel == KernelAction::Grant)) {
          n.downlink.push_back(w);
        }
        n.kernel.erase(n.kernel.begin());
        break;
      }
    }
  }

  // 3. interposer
  InterposerInputs in;
  in.master_r = t.wires[0];
  in.master_w = t.wires[1];
  in.fabric_ready_r = label.ready[0];
  in.fabric_ready_w = label.ready[1];
  if (!n.downlink.empty()) {
    in.fsl_in = n.downlink.front();
    n.downlink.erase(n.downlink.begin());
  }
  in.fsl_out_space = n.uplink.size() < cfg.link_depth;
  t.out = n.ip.step(in);
  if (t.out.fsl_out) n.uplink.push_back(*t.out.fsl_out);
  n.ip.desync_count = 0;
  n.ip.malformed_count = 0;

  // 4. attacker bookkeeping
  for (AccessKind k : kKinds) {
    const std::size_t i = idx(k);
    n.attacker[i] =
        attacker_after(s.attacker[i], cfg.may_mutate, t.wires[i], t.out.channel(k).master_ack);
  }

  // 5. invariant, write channel first as in the system scheduler
  for (AccessKind k : {AccessKind::Write, AccessKind::Read}) {
    const ChannelReport& rep = t.out.channel(k);
    if (!rep.forwarded) continue;
    const bool allows = n.ip.table.decide(*rep.forwarded) == Decision::Allow;
    const bool bad = cfg.mode == CheckMode::Strict ? !(rep.approved && *rep.approved == *rep.forwarded)
                                                   : !allows;
    if (bad) {
      t.violation = Violation{k, *rep.forwarded, rep.approved, allows, std::string(to_string(cfg.mode))};
      break;
    }
  }
  return t;
}

std::vector<Transition> successors(const AbstractState& s, const CheckConfig& cfg,
                                   const AttackDomain& domain) {
  std::array<std::vector<AttackerMove>, 2> moves;
  for (AccessKind k : kKinds) {
    if (attacked(cfg, k)) {
      moves[idx(k)] = attacker_moves(s.attacker[idx(k)], cfg.may_mutate, domain, k, 0);
    } else {
      moves[idx(k)] = {AttackerMove{}};
    }
  }
  std::vector<KernelAction> kacts;
  if (s.kernel.empty() && s.uplink.empty()) {
    kacts = {KernelAction::None};
  } else {
    kacts = {KernelAction::Wait, KernelAction::Grant, KernelAction::Deny};
  }
  const std::vector<bool> ready_r = cfg.attack_read ? std::vector<bool>{false, true} : std::vector<bool>{false};
  const std::vector<bool> ready_w = cfg.attack_write ? std::vector<bool>{false, true} : std::vector<bool>{false};

  std::vector<Transition> out;
  std::unordered_set<std::string> seen;
  for (const auto& mr : moves[0]) {
    for (const auto& mw : moves[1]) {
      for (bool rr : ready_r) {
        for (bool rw : ready_w) {
          for (KernelAction ka : kacts) {
            StepLabel label;
            label.choice = {mr.choice, mw.choice};
            label.index = {static_cast<std::uint8_t>(mr.index), static_cast<std::uint8_t>(mw.index)};
            label.ready = {rr, rw};
            label.kernel = ka;
            auto t = apply_label(s, label, cfg, domain);
            if (!t) continue;
            if (!t->violation && !seen.insert(t->next.key()).second) continue;
            out.push_back(std::move(*t));
          }
        }
      }
    }
  }
  return out;
}

std::vector<StepLabel> Counterexample::labels() const {
  std::vector<StepLabel> v;
  v.reserve(steps.size());
  for (const auto& s : steps) v.push_back(s.label);
  return v;
}

Counterexample expand_labels(const std::vector<StepLabel>& labels, const CheckConfig& cfg) {
  const AttackDomain domain = make_domain(cfg);
  Counterexample cx;
  AbstractState s = initial_state(cfg);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    auto t = apply_label(s, labels[c], cfg, domain);
    if (!t) throw std::invalid_argument("label " + std::to_string(c) + " is not enabled");
    CxStep st;
    st.cycle = c;
    st.label = labels[c];
    st.wires = t->wires;
    for (AccessKind k : kKinds) {
      const std::size_t i = idx(k);
      const ChannelController& ch = t->next.ip.channel(k);
      const ChannelReport& rep = t->out.channel(k);
      st.channel_state[i] = ch.state;
      st.filter_state[i] = ch.filter.state;
      st.decision[i] = rep.decision;
      st.forwarded[i] = rep.forwarded;
      st.approved[i] = rep.approved;
    }
    st.intr = t->out.fsl_out;
    if (t->out.command) st.command = encode_command(*t->out.command);
    st.rules = t->next.ip.table.size();
    cx.steps.push_back(st);
    if (t->violation) {
      cx.violation = t->violation;
      break;
    }
    s = std::move(t->next);
  }
  return cx;
}

CheckResult check(const CheckConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const AttackDomain domain = make_domain(cfg);
  CheckResult result;
  auto finish = [&](CheckVerdict v) {
    result.verdict = std::move(v);
    result.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  };

  struct Node {
    std::uint64_t parent;
    StepLabel label;
  };
  constexpr std::uint64_t kRoot = std::numeric_limits<std::uint64_t>::max();
  std::vector<Node> nodes;
  std::unordered_set<std::string> visited;

  struct Item {
    AbstractState state;
    std::uint64_t node;
  };
  std::vector<Item> frontier;
  {
    AbstractState s0 = initial_state(cfg);
    visited.insert(s0.key());
    nodes.push_back({kRoot, {}});
    frontier.push_back({std::move(s0), 0});
  }
  result.stats.states = 1;

  auto path_to = [&](std::uint64_t node) {
    std::vector<StepLabel> labels;
    for (std::uint64_t n = node; nodes[n].parent != kRoot; n = nodes[n].parent) {
      labels.push_back(nodes[n].label);
    }
    std::reverse(labels.begin(), labels.end());
    return labels;
  };

  const unsigned threads = std::max(1u, cfg.threads);
  constexpr std::size_t kBlock = 2048;

  struct Expanded {
    std::vector<Transition> fresh;  // not in `visited` at expansion time
    std::optional<Transition> violation;
    std::uint64_t generated = 0;
  };

  for (std::uint64_t d = 0; d < cfg.depth; ++d) {
    std::vector<Item> next;
    for (std::size_t lo = 0; lo < frontier.size(); lo += kBlock) {
      const std::size_t hi = std::min(frontier.size(), lo + kBlock);
      std::vector<Expanded> block(hi - lo);

      auto work = [&](std::size_t i) {
        Expanded& e = block[i];
        for (auto& t : successors(frontier[lo + i].state, cfg, domain)) {
          ++e.generated;
          if (t.violation) {
            if (!e.violation) e.violation = std::move(t);
            continue;
          }
          if (!visited.count(t.next.key())) e.fresh.push_back(std::move(t));
        }
      };

      if (threads == 1 || block.size() < 2) {
        for (std::size_t i = 0; i < block.size(); ++i) work(i);
      } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(block.size()));
        for (unsigned w = 0; w < n; ++w) {
          pool.emplace_back([&] {
            for (std::size_t i = cursor++; i < block.size(); i = cursor++) work(i);
          });
        }
        for (auto& th : pool) th.join();
      }

      // Merge in frontier order so the outcome does not depend on scheduling.
      for (std::size_t i = 0; i < block.size(); ++i) {
        Expanded& e = block[i];
        result.stats.transitions += e.generated;
        if (e.violation) {
          auto labels = path_to(frontier[lo + i].node);
          labels.push_back(e.violation->label);
          result.stats.states = visited.size();
          result.stats.depth_reached = d + 1;
          return finish(expand_labels(labels, cfg));
        }
        for (auto& t : e.fresh) {
          if (!visited.insert(t.next.key()).second) continue;
          nodes.push_back({frontier[lo + i].node, t.label});
          next.push_back({std::move(t.next), nodes.size() - 1});
        }
      }
      if (visited.size() > cfg.state_limit) {
        result.stats.states = visited.size();
        result.stats.depth_reached = d;
        return finish(Inconclusive{cfg.state_limit, d});
      }
    }
    result.stats.states = visited.size();
    result.stats.depth_reached = d + 1;
    if (next.empty()) {
      result.stats.fixpoint = true;
      break;
    }
    frontier = std::move(next);
  }
  result.stats.states = visited.size();
  return finish(Verified{cfg.depth});
}

bool is_wait_state_swap(const Counterexample& cx) {
  if (!cx.violation || cx.steps.empty()) return false;
  const std::size_t k = idx(cx.violation->channel);
  const CxStep& last = cx.steps.back();
  if (last.label.choice[k] != AttackChoice::Impermissible || !last.label.ready[k]) return false;
  if (!last.forwarded[k] || !last.wires[k] || *last.forwarded[k] != *last.wires[k]) return false;
  if (!cx.violation->approved || *cx.violation->approved == *last.forwarded[k]) return false;
  // Find the approval that left the filter waiting, with the filter still
  // waiting up to the final cycle.
  for (std::size_t i = cx.steps.size() - 1; i-- > 0;) {
    const CxStep& s = cx.steps[i];
    if (s.filter_state[k] != FilterState::Waiting) return false;
    if (s.label.choice[k] == AttackChoice::Permissible && !s.label.ready[k] &&
        s.decision[k] == Decision::Allow && s.wires[k] &&
        *s.wires[k] == *cx.violation->approved) {
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Config loading

CheckConfig load_check_config(const ConfigDocument& doc) {
  ConfigReader rd;
  CheckConfig cfg;
  const YAML::Node c = doc.root["check"];
  if (!c) {
    validate(cfg);
    return cfg;
  }
  if (!c.IsMap()) {
    rd.error("check", "expected a mapping");
    rd.finish();
  }
  if (c["variant"]) cfg.variant = rd.variant(c["variant"], "check.variant").value_or(cfg.variant);
  cfg.depth = rd.u64(c["depth"], "check.depth", cfg.depth);
  cfg.capacity = rd.u64(c["capacity"], "check.capacity", cfg.capacity);
  cfg.register_slice = rd.boolean(c["register_slice"], "check.register_slice", cfg.register_slice);
  cfg.kernel_max_delay =
      static_cast<unsigned>(rd.u64(c["kernel_max_delay"], "check.kernel_max_delay", cfg.kernel_max_delay));
  cfg.link_depth = rd.u64(c["link_depth"], "check.link_depth", cfg.link_depth);
  cfg.may_mutate = rd.boolean(c["may_mutate"], "check.may_mutate", cfg.may_mutate);
  cfg.state_limit = rd.u64(c["state_limit"], "check.state_limit", cfg.state_limit);
  cfg.threads = static_cast<unsigned>(rd.u64(c["threads"], "check.threads", cfg.threads));
  if (c["mode"]) {
    const std::string m = rd.string(c["mode"], "check.mode");
    if (m == "strict") {
      cfg.mode = CheckMode::Strict;
    } else if (m == "policy") {
      cfg.mode = CheckMode::Policy;
    } else {
      rd.error("check.mode", "expected strict or policy");
    }
  }
  if (c["channels"]) {
    const std::string ch = rd.string(c["channels"], "check.channels");
    if (ch == "both") {
      cfg.attack_read = cfg.attack_write = true;
    } else if (ch == "read") {
      cfg.attack_read = true;
      cfg.attack_write = false;
    } else if (ch == "write") {
      cfg.attack_read = false;
      cfg.attack_write = true;
    } else {
      rd.error("check.channels", "expected both, read or write");
    }
  }
  if (const YAML::Node dom = c["domain"]) {
    cfg.domain.clear();
    if (!dom.IsSequence()) rd.error("check.domain", "expected a list of addresses");
    for (std::size_t i = 0; dom.IsSequence() && i < dom.size(); ++i) {
      cfg.domain.push_back(rd.address(dom[i], "check.domain." + std::to_string(i)));
    }
  }
  if (const YAML::Node rules = c["rules"]) {
    cfg.rules.clear();
    if (!rules.IsSequence()) rd.error("check.rules", "expected a list of rules");
    for (std::size_t i = 0; rules.IsSequence() && i < rules.size(); ++i) {
      if (auto r = rd.rule(rules[i], "check.rules." + std::to_string(i))) cfg.rules.push_back(*r);
    }
  }
  rd.finish();
  validate(cfg);
  return cfg;
}

void validate(const CheckConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.capacity < 1) errors.push_back("check.capacity: capacity must be at least 1");
  if (cfg.rules.size() > cfg.capacity) {
    errors.push_back("check.rules: more reference rules than the table capacity");
  }
  if (cfg.kernel_max_delay < 1) errors.push_back("check.kernel_max_delay: must be at least 1");
  if (cfg.link_depth < 2) errors.push_back("check.link_depth: must be at least 2");
  if (!cfg.attack_read && !cfg.attack_write) {
    errors.push_back("check.channels: at least one channel must be attacked");
  }
  if (cfg.threads < 1) errors.push_back("check.threads: must be at least 1");
  if (cfg.domain.size() > 255) errors.push_back("check.domain: at most 255 addresses");
  for (const auto& r : cfg.rules) {
    if (!is_aligned(r.base, r.size)) errors.push_back("check.rules: unaligned rule base");
  }
  if (errors.empty()) {
    try {
      (void)make_domain(cfg);
    } catch (const AttackDomainError& e) {
      errors.push_back(std::string("check.domain: ") + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string req_str(const std::optional<AddressRequest>& r) {
  if (!r) return "-";
  return hex32(r->addr);
}

std::string choice_str(const StepLabel& l, std::size_t i) {
  std::string s(to_string(l.choice[i]));
  if (l.choice[i] != AttackChoice::NoRequest && l.index[i] != 0) {
    s += "#" + std::to_string(l.index[i]);
  }
  return s;
}

}  // namespace

std::string describe(const CheckConfig& cfg) {
  std::ostringstream os;
  os << "variant=" << to_string(cfg.variant) << " depth=" << cfg.depth
     << " mode=" << to_string(cfg.mode) << " capacity=" << cfg.capacity
     << " kernel_max_delay=" << cfg.kernel_max_delay << " may_mutate=" << (cfg.may_mutate ? "yes" : "no")
     << " register_slice=" << (cfg.register_slice ? "yes" : "no") << " channels="
     << (cfg.attack_read && cfg.attack_write ? "both" : cfg.attack_read ? "read" : "write")
     << " domain=[";
  for (std::size_t i = 0; i < cfg.domain.size(); ++i) os << (i ? "," : "") << hex32(cfg.domain[i]);
  os << "]";
  return os.str();
}

std::string report_text(const CheckConfig& cfg, const CheckResult& r) {
  std::ostringstream os;
  os << "config: " << describe(cfg) << "\n";
  if (r.verified()) {
    os << "result: VERIFIED to depth " << std::get<Verified>(r.verdict).depth;
    if (r.stats.fixpoint) os << " (state space closed at depth " << r.stats.depth_reached << ")";
    os << "\n";
  } else if (r.inconclusive()) {
    const auto& inc = std::get<Inconclusive>(r.verdict);
    os << "result: INCONCLUSIVE, state limit " << inc.limit << " exceeded after depth " << inc.depth
       << "\n";
  } else {
    const auto& cx = r.counterexample();
    os << "result: VIOLATION at depth " << cx.depth() << " (" << cx.violation->invariant << ", "
       << to_string(cx.violation->channel) << " channel forwarded "
       << to_string(cx.violation->forwarded) << ", approved " << req_str(cx.violation->approved)
       << ")\n";
    os << "pattern: " << (is_wait_state_swap(cx) ? "wait-state swap" : "other") << "\n";
    os << "cycle  read(choice,ready,wires)              write(choice,ready,wires)             "
          "kernel  R-state/filter       W-state/filter       forwarded\n";
    for (const auto& s : cx.steps) {
      char line[512];
      std::snprintf(line, sizeof line,
                    "%5llu  %-13s %d %-12s          %-13s %d %-12s          %-6s  %-8s/%-10s  "
                    "%-8s/%-10s  R=%s W=%s\n",
                    static_cast<unsigned long long>(s.cycle), choice_str(s.label, 0).c_str(),
                    s.label.ready[0] ? 1 : 0, req_str(s.wires[0]).c_str(),
                    choice_str(s.label, 1).c_str(), s.label.ready[1] ? 1 : 0,
                    req_str(s.wires[1]).c_str(), std::string(to_string(s.label.kernel)).c_str(),
                    std::string(to_string(s.channel_state[0])).c_str(),
                    std::string(to_string(s.filter_state[0])).c_str(),
                    std::string(to_string(s.channel_state[1])).c_str(),
                    std::string(to_string(s.filter_state[1])).c_str(),
                    req_str(s.forwarded[0]).c_str(), req_str(s.forwarded[1]).c_str());
      os << line;
    }
  }
  os << "states: " << r.stats.states << " transitions: " << r.stats.transitions << " seconds: ";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", r.stats.seconds);
  os << buf << "\n";
  return os.str();
}

std::string report_structured(const CheckConfig& cfg, const CheckResult& r) {
  using nlohmann::ordered_json;
  auto req_json = [](const std::optional<AddressRequest>& q) -> ordered_json {
    if (!q) return nullptr;
    return {{"id", q->id}, {"addr", hex32(q->addr)}, {"kind", to_string(q->kind)}, {"len", q->burst_len}};
  };
  ordered_json head;
  head["type"] = "check";
  head["variant"] = to_string(cfg.variant);
  head["depth_bound"] = cfg.depth;
  head["mode"] = to_string(cfg.mode);
  head["may_mutate"] = cfg.may_mutate;
  head["register_slice"] = cfg.register_slice;
  head["kernel_max_delay"] = cfg.kernel_max_delay;
  head["capacity"] = cfg.capacity;
  ordered_json dom = ordered_json::array();
  for (Address a : cfg.domain) dom.push_back(hex32(a));
  head["domain"] = dom;
  if (r.verified()) {
    head["verdict"] = "verified";
    head["depth"] = std::get<Verified>(r.verdict).depth;
  } else if (r.inconclusive()) {
    head["verdict"] = "inconclusive";
    head["limit"] = std::get<Inconclusive>(r.verdict).limit;
    head["depth"] = std::get<Inconclusive>(r.verdict).depth;
  } else {
    const auto& cx = r.counterexample();
    head["verdict"] = "violation";
    head["depth"] = cx.depth();
    head["invariant"] = cx.violation->invariant;
    head["channel"] = to_string(cx.violation->channel);
    head["forwarded"] = req_json(cx.violation->forwarded);
    head["approved"] = req_json(cx.violation->approved);
    head["wait_state_swap"] = is_wait_state_swap(cx);
  }
  head["states"] = r.stats.states;
  head["transitions"] = r.stats.transitions;
  head["fixpoint"] = r.stats.fixpoint;
  std::string out = head.dump() + "\n";
  if (r.violated()) {
    for (const auto& s : r.counterexample().steps) {
      ordered_json j;
      j["type"] = "step";
      j["cycle"] = s.cycle;
      for (AccessKind k : kKinds) {
        const std::size_t i = idx(k);
        ordered_json c;
        c["choice"] = to_string(s.label.choice[i]);
        c["index"] = s.label.index[i];
        c["ready"] = s.label.ready[i];
        c["wires"] = req_json(s.wires[i]);
        c["state"] = to_string(s.channel_state[i]);
        c["filter"] = to_string(s.filter_state[i]);
        c["decision"] = s.decision[i] ? ordered_json(to_string(*s.decision[i])) : ordered_json(nullptr);
        c["forwarded"] = req_json(s.forwarded[i]);
        c["approved"] = req_json(s.approved[i]);
        j[k == AccessKind::Read ? "read" : "write"] = c;
      }
      j["kernel"] = to_string(s.label.kernel);
      j["fsl_in"] = s.command ? ordered_json(hex32(s.command->raw)) : ordered_json(nullptr);
      j["fsl_out"] = s.intr ? ordered_json(hex32(s.intr->raw)) : ordered_json(nullptr);
      j["rules"] = s.rules;
      out += j.dump() + "\n";
    }
  }
  return out;
}

}  // namespace nocf
