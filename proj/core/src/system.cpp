#include "nocf/system.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace nocf {

// ---------------------------------------------------------------------------
// ReadyPattern

namespace {

// splitmix64: stateless per-cycle draw so patterns need no mutable state.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string bits_string(const std::vector<bool>& bits) {
  std::string s;
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

bool ReadyPattern::operator()(std::uint64_t cycle) const {
  struct Visitor {
    std::uint64_t t;
    bool operator()(const Always&) const { return true; }
    bool operator()(const Never&) const { return false; }
    bool operator()(const Every& e) const { return e.period == 0 || t % e.period == e.phase % e.period; }
    bool operator()(const Repeat& r) const { return r.bits.empty() || r.bits[t % r.bits.size()]; }
    bool operator()(const Script& s) const { return t < s.bits.size() ? s.bits[t] : s.tail; }
    bool operator()(const Random& r) const {
      const double u = static_cast<double>(mix(r.seed ^ mix(t)) >> 11) * 0x1.0p-53;
      return u < r.p;
    }
  };
  return std::visit(Visitor{cycle}, spec_);
}

std::string ReadyPattern::describe() const {
  struct Visitor {
    std::string operator()(const Always&) const { return "always"; }
    std::string operator()(const Never&) const { return "never"; }
    std::string operator()(const Every& e) const {
      return "every:" + std::to_string(e.period) + "+" + std::to_string(e.phase);
    }
    std::string operator()(const Repeat& r) const { return "repeat:" + bits_string(r.bits); }
    std::string operator()(const Script& s) const {
      return "script:" + bits_string(s.bits) + (s.tail ? "/1" : "/0");
    }
    std::string operator()(const Random& r) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "random:%.3f", r.p);
      return buf;
    }
  };
  return std::visit(Visitor{}, spec_);
}

// ---------------------------------------------------------------------------
// MemorySlave

MemorySlave::MemorySlave(std::string name, Address base, std::uint64_t size, ReadyPattern ready)
    : name_(std::move(name)), base_(base), size_(size), ready_(std::move(ready)) {}

std::uint8_t MemorySlave::read_byte(Address a) const {
  auto it = bytes_.find(a);
  return it == bytes_.end() ? 0 : it->second;
}

void MemorySlave::write_byte(Address a, std::uint8_t v) {
  if (contains(a)) bytes_[a] = v;
}

std::vector<std::uint8_t> MemorySlave::read_bytes(Address a, std::size_t n) const {
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = read_byte(a + static_cast<Address>(i));
  return out;
}

void MemorySlave::write_bytes(Address a, const std::vector<std::uint8_t>& bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i) write_byte(a + static_cast<Address>(i), bytes[i]);
}

// ---------------------------------------------------------------------------

std::size_t Topology::port_count() const {
  std::size_t n = 0;
  for (const auto& m : masters) n += m.ports.size();
  return n;
}

bool TraceRecord::has_events() const {
  if (!transfers.empty()) return true;
  for (const auto& ip : interposers) {
    for (const ChannelTrace* c : {&ip.r, &ip.w}) {
      if (c->live || c->committed || c->forwarded || c->response || c->decision ||
          c->state != ChannelState::Enforce || c->filter != FilterState::Idle) {
        return true;
      }
    }
    if (ip.fsl_in || ip.fsl_out) return true;
  }
  return false;
}

System::System(const Topology& topo)
    : kernel_(GrantMap(topo.grants), topo.kernel_latency) {
  std::set<std::string> slave_names;
  for (const auto& s : topo.slaves) {
    if (s.size == 0) throw std::invalid_argument("slave " + s.name + " has zero size");
    if (!slave_names.insert(s.name).second) {
      throw std::invalid_argument("duplicate slave name " + s.name);
    }
    for (const auto& other : slaves_) {
      const std::uint64_t lo = s.base, hi = lo + s.size;
      const std::uint64_t olo = other.base(), ohi = olo + other.size();
      if (lo < ohi && olo < hi) {
        throw std::invalid_argument("slave " + s.name + " overlaps slave " + other.name());
      }
    }
    slaves_.emplace_back(s.name, s.base, s.size, s.ready);
    for (const auto& init : s.init) slaves_.back().write_bytes(init.addr, init.bytes);
  }

  std::set<std::string> port_names;
  for (const auto& m : topo.masters) {
    for (const auto& p : m.ports) {
      Port port{m.name, m.name + "." + p.name, Interposer(p.interposer), p.fabric_read,
                p.fabric_write, nullptr, {}, {}};
      if (!port_names.insert(port.name).second) {
        throw std::invalid_argument("duplicate port " + port.name);
      }
      for (const auto& r : p.initial_rules) port.ip.table.insert(r);
      port.behavior = p.behavior.make ? p.behavior.make() : std::make_unique<IdleMaster>();
      ports_.push_back(std::move(port));
      uplinks_.emplace_back(topo.link_depth);
      downlinks_.emplace_back(topo.link_depth);
      kernel_.add_link(m.name);
    }
  }
  if (topo.kernel_script) kernel_.set_scripted(*topo.kernel_script);
}

std::optional<std::size_t> System::find_port(const std::string& qualified) const {
  for (std::size_t i = 0; i < ports_.size(); ++i) {
    if (ports_[i].name == qualified) return i;
  }
  return std::nullopt;
}

const MemorySlave* System::find_slave(const std::string& name) const {
  for (const auto& s : slaves_) {
    if (s.name() == name) return &s;
  }
  return nullptr;
}

MemorySlave* System::find_slave(const std::string& name) {
  for (auto& s : slaves_) {
    if (s.name() == name) return &s;
  }
  return nullptr;
}

MemorySlave* System::route(Address a) {
  for (auto& s : slaves_) {
    if (s.contains(a)) return &s;
  }
  return nullptr;
}

namespace {

ChannelTrace channel_trace(const ChannelController& after, const ChannelReport& rep) {
  ChannelTrace t;
  t.state = after.state;
  t.filter = after.filter.state;
  t.live = rep.live;
  t.committed = after.filter.committed_request;
  t.decision = rep.decision;
  t.forwarded = rep.forwarded;
  t.approved = rep.approved;
  t.response = rep.response;
  t.master_ack = rep.master_ack;
  return t;
}

void count(ChannelStats& s, const ChannelReport& rep, const ChannelController& after) {
  if (rep.filter_before == FilterState::Idle && rep.live) ++s.presented;
  if (rep.forwarded) ++s.forwards;
  if (rep.state_before != ChannelState::Request && after.state == ChannelState::Request) ++s.blocks;
  if (rep.resumed_allow) ++s.delayed;
  if (rep.dropped) ++s.denials;
  if (rep.response && rep.response->kind == ResponseKind::DecodeError) ++s.decode_error_beats;
}

}  // namespace

TraceRecord System::step() {
  const std::uint64_t t = cycle_;
  TraceRecord rec;
  rec.cycle = t;

  // 1. masters drive
  std::vector<MasterOutput> drive(ports_.size());
  for (std::size_t i = 0; i < ports_.size(); ++i) drive[i] = ports_[i].behavior->present(t);

  // 2. kernel
  kernel_.service(t, uplinks_, downlinks_);

  // 3 + 4. interposers in port order, each followed by its slave transfers
  std::vector<PortFeedback> fb(ports_.size());
  std::vector<std::array<bool, 2>> claimed(slaves_.size(), {false, false});

  for (std::size_t i = 0; i < ports_.size(); ++i) {
    Port& p = ports_[i];
    auto ready_for = [&](AccessKind k, const PortAction& master) {
      const ReadyPattern& fabric = k == AccessKind::Read ? p.fabric_read : p.fabric_write;
      if (!fabric(t)) return false;
      const PortAction req = p.ip.fabric_request(k, master);
      if (!req) return true;
      const MemorySlave* s = route(req->addr);
      if (!s) return true;  // the fabric answers unmapped addresses itself
      const auto idx = static_cast<std::size_t>(s - slaves_.data());
      return !claimed[idx][k == AccessKind::Read ? 0 : 1] && s->ready(t);
    };

    InterposerInputs in;
    in.master_r = drive[i].read;
    in.master_w = drive[i].write;
    in.fabric_ready_r = ready_for(AccessKind::Read, drive[i].read);
    in.fabric_ready_w = ready_for(AccessKind::Write, drive[i].write);
    in.fsl_in = downlinks_[i].pop();
    in.fsl_out_space = uplinks_[i].has_space();

    const InterposerOutputs out = p.ip.step(in);
    if (out.fsl_out) uplinks_[i].try_push(*out.fsl_out);

    count(p.read_stats, out.r, p.ip.read);
    count(p.write_stats, out.w, p.ip.write);

    InterposerTrace it;
    it.port = p.name;
    it.r = channel_trace(p.ip.read, out.r);
    it.w = channel_trace(p.ip.write, out.w);
    it.fsl_in = in.fsl_in;
    it.fsl_out = out.fsl_out;
    it.policy_busy = out.policy_busy;
    it.rules = p.ip.table.size();
    rec.interposers.push_back(std::move(it));

    fb[i].read_ack = out.r.master_ack;
    fb[i].write_ack = out.w.master_ack;

    for (const ChannelReport* rep : {&out.w, &out.r}) {
      if (rep->response) {
        fb[i].responses.push_back(*rep->response);
        if (rep->response->last) ++decode_errors_;
      }
      if (!rep->forwarded) continue;
      const AddressRequest& req = *rep->forwarded;

      TransferTrace tr;
      tr.port = p.name;
      tr.request = req;
      tr.approved_match = rep->approved && *rep->approved == req;
      tr.policy_allows = p.ip.table.decide(req) == Decision::Allow;
      if (!tr.approved_match) ++approval_mismatches_;
      if (!tr.policy_allows) ++policy_violations_;

      MemorySlave* s = route(req.addr);
      const auto beats = burst_footprint(req);
      const std::size_t beat_bytes = std::size_t{1} << req.burst_size_log2;
      if (!s) {
        ++unrouted_;
        ++decode_errors_;
        for (std::size_t b = 0; b < (req.kind == AccessKind::Read ? beats.size() : 1); ++b) {
          const bool last = req.kind == AccessKind::Write || b + 1 == beats.size();
          fb[i].responses.push_back(Response{req.kind, req.id, ResponseKind::DecodeError, last});
        }
      } else {
        tr.slave = s->name();
        claimed[static_cast<std::size_t>(s - slaves_.data())][req.kind == AccessKind::Read ? 0 : 1] =
            true;
        if (req.kind == AccessKind::Write) {
          const auto data = p.behavior->write_data(req);
          std::size_t k = 0;
          for (Address a : beats) {
            for (std::size_t j = 0; j < beat_bytes && k < data.size(); ++j, ++k) {
              s->write_byte(a + static_cast<Address>(j), data[k]);
            }
          }
          fb[i].responses.push_back(Response{req.kind, req.id, ResponseKind::Okay, true});
        } else {
          ReadReturn rr{req, {}};
          for (Address a : beats) {
            const auto bytes = s->read_bytes(a, beat_bytes);
            rr.data.insert(rr.data.end(), bytes.begin(), bytes.end());
          }
          fb[i].reads.push_back(std::move(rr));
          fb[i].responses.push_back(Response{req.kind, req.id, ResponseKind::Okay, true});
        }
      }
      rec.transfers.push_back(std::move(tr));
    }
  }

  // 5. feedback and commit
  for (std::size_t i = 0; i < ports_.size(); ++i) ports_[i].behavior->feedback(t, fb[i]);
  ++cycle_;
  return rec;
}

RunResult System::run(std::uint64_t n_cycles) {
  RunResult r;
  r.trace.reserve(n_cycles);
  for (std::uint64_t i = 0; i < n_cycles; ++i) r.trace.push_back(step());
  r.stats = stats();
  return r;
}

SimStats System::run(std::uint64_t n_cycles, const std::function<void(const TraceRecord&)>& sink) {
  for (std::uint64_t i = 0; i < n_cycles; ++i) sink(step());
  return stats();
}

SimStats System::stats() const {
  SimStats s;
  s.cycles = cycle_;
  s.decode_errors = decode_errors_;
  s.unrouted = unrouted_;
  s.policy_violations = policy_violations_;
  s.approval_mismatches = approval_mismatches_;
  s.kernel = kernel_.stats();
  for (const auto& p : ports_) {
    PortStats ps;
    ps.port = p.name;
    ps.read = p.read_stats;
    ps.write = p.write_stats;
    ps.in_filter_read = p.ip.read.filter.state != FilterState::Idle ? 1 : 0;
    ps.in_filter_write = p.ip.write.filter.state != FilterState::Idle ? 1 : 0;
    ps.desync = p.ip.desync_count;
    ps.malformed_commands = p.ip.malformed_count;
    for (const ChannelStats* c : {&p.read_stats, &p.write_stats}) {
      s.forwards += c->forwards;
      s.denials += c->denials;
      s.delayed += c->delayed;
    }
    s.ports.push_back(std::move(ps));
  }
  return s;
}

std::vector<std::pair<std::uint64_t, TransferTrace>> unapproved_transfers(
    const std::vector<TraceRecord>& trace) {
  std::vector<std::pair<std::uint64_t, TransferTrace>> bad;
  for (const auto& rec : trace) {
    for (const auto& tr : rec.transfers) {
      if (!tr.approved_match) bad.emplace_back(rec.cycle, tr);
    }
  }
  return bad;
}

}  // namespace nocf
