#include "nocf/trace.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nocf {
namespace {

using nlohmann::ordered_json;

ordered_json request_json(const AddressRequest& r) {
  ordered_json j;
  j["id"] = r.id;
  j["addr"] = hex32(r.addr);
  j["kind"] = to_string(r.kind);
  j["len"] = r.burst_len;
  j["size"] = 1u << r.burst_size_log2;
  j["burst"] = to_string(r.burst_type);
  return j;
}

ordered_json opt_request(const std::optional<AddressRequest>& r) {
  return r ? request_json(*r) : ordered_json(nullptr);
}

ordered_json channel_json(const ChannelTrace& c) {
  ordered_json j;
  j["state"] = to_string(c.state);
  j["filter"] = to_string(c.filter);
  j["live"] = opt_request(c.live);
  j["committed"] = opt_request(c.committed);
  j["decision"] = c.decision ? ordered_json(to_string(*c.decision)) : ordered_json(nullptr);
  j["forwarded"] = opt_request(c.forwarded);
  j["approved"] = opt_request(c.approved);
  if (c.response) {
    j["response"] = {{"id", c.response->id},
                     {"kind", to_string(c.response->kind)},
                     {"last", c.response->last}};
  } else {
    j["response"] = nullptr;
  }
  j["ack"] = c.master_ack;
  return j;
}

ordered_json channel_stats_json(const ChannelStats& c) {
  return {{"presented", c.presented}, {"forwards", c.forwards}, {"blocks", c.blocks},
          {"delayed", c.delayed},     {"denials", c.denials},   {"decerr_beats", c.decode_error_beats}};
}

const char* req_text(const std::optional<AddressRequest>& r, char* buf, std::size_t n) {
  if (!r) return "-";
  std::snprintf(buf, n, "%u@%08X", unsigned{r->id}, r->addr);
  return buf;
}

}  // namespace

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

std::string header_line(const std::map<std::string, std::string>& fields,
                        const std::map<std::string, std::string>& overrides) {
  ordered_json j;
  j["type"] = "header";
  for (const auto& [k, v] : fields) j[k] = v;
  j["overrides"] = ordered_json::object();
  for (const auto& [k, v] : overrides) j["overrides"][k] = v;
  return j.dump();
}

std::string trace_line(const TraceRecord& rec) {
  ordered_json j;
  j["type"] = "cycle";
  j["cycle"] = rec.cycle;
  ordered_json ips = ordered_json::array();
  for (const auto& ip : rec.interposers) {
    ordered_json e;
    e["port"] = ip.port;
    e["read"] = channel_json(ip.r);
    e["write"] = channel_json(ip.w);
    e["fsl_in"] = ip.fsl_in ? ordered_json(hex32(ip.fsl_in->raw)) : ordered_json(nullptr);
    e["fsl_out"] = ip.fsl_out ? ordered_json(hex32(ip.fsl_out->raw)) : ordered_json(nullptr);
    e["policy_busy"] = ip.policy_busy;
    e["rules"] = ip.rules;
    ips.push_back(std::move(e));
  }
  j["interposers"] = std::move(ips);
  ordered_json trs = ordered_json::array();
  for (const auto& tr : rec.transfers) {
    trs.push_back({{"port", tr.port},
                   {"slave", tr.slave.empty() ? ordered_json(nullptr) : ordered_json(tr.slave)},
                   {"request", request_json(tr.request)},
                   {"approved_match", tr.approved_match},
                   {"policy_allows", tr.policy_allows}});
  }
  j["transfers"] = std::move(trs);
  return j.dump();
}

std::string stats_line(const SimStats& s) {
  ordered_json j;
  j["type"] = "stats";
  j["cycles"] = s.cycles;
  j["forwards"] = s.forwards;
  j["denials"] = s.denials;
  j["delayed"] = s.delayed;
  j["decode_errors"] = s.decode_errors;
  j["unrouted"] = s.unrouted;
  j["policy_violations"] = s.policy_violations;
  j["approval_mismatches"] = s.approval_mismatches;
  j["kernel"] = {{"interrupts", s.kernel.interrupts},
                 {"grants", s.kernel.grants},
                 {"denials", s.kernel.denials},
                 {"malformed", s.kernel.malformed}};
  ordered_json ports = ordered_json::array();
  for (const auto& p : s.ports) {
    ports.push_back({{"port", p.port},
                     {"read", channel_stats_json(p.read)},
                     {"write", channel_stats_json(p.write)},
                     {"in_filter_read", p.in_filter_read},
                     {"in_filter_write", p.in_filter_write},
                     {"desync", p.desync},
                     {"malformed_commands", p.malformed_commands}});
  }
  j["ports"] = std::move(ports);
  return j.dump();
}

std::string trace_text(const TraceRecord& rec) {
  std::ostringstream os;
  os << "cycle " << rec.cycle;
  char a[32], b[32];
  for (const auto& ip : rec.interposers) {
    bool active = false;
    for (const ChannelTrace* c : {&ip.r, &ip.w}) {
      active |= c->live || c->forwarded || c->response || c->state != ChannelState::Enforce ||
                c->filter != FilterState::Idle;
    }
    if (!active && !ip.fsl_in && !ip.fsl_out) continue;
    os << "\n  " << ip.port;
    for (auto [tag, c] : {std::pair{"R", &ip.r}, std::pair{"W", &ip.w}}) {
      os << " " << tag << "[" << to_string(c->state) << "/" << to_string(c->filter)
         << " live=" << req_text(c->live, a, sizeof a)
         << " fwd=" << req_text(c->forwarded, b, sizeof b);
      if (c->response) os << " resp=" << to_string(c->response->kind);
      os << "]";
    }
    if (ip.fsl_in) os << " in=" << hex32(ip.fsl_in->raw);
    if (ip.fsl_out) os << " out=" << hex32(ip.fsl_out->raw);
  }
  for (const auto& tr : rec.transfers) {
    os << "\n  xfer " << tr.port << " -> " << (tr.slave.empty() ? "<unmapped>" : tr.slave) << " "
       << to_string(tr.request);
  }
  return os.str();
}

std::string stats_text(const SimStats& s) {
  std::ostringstream os;
  os << "cycles=" << s.cycles << " forwards=" << s.forwards << " denials=" << s.denials
     << " delayed=" << s.delayed << " decode_errors=" << s.decode_errors
     << " unrouted=" << s.unrouted << " policy_violations=" << s.policy_violations
     << " approval_mismatches=" << s.approval_mismatches
     << " kernel_interrupts=" << s.kernel.interrupts << " kernel_grants=" << s.kernel.grants;
  return os.str();
}

}  // namespace nocf
