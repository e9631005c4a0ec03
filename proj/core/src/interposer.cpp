#include "nocf/interposer.hpp"

#include <cassert>

namespace nocf {

PortAction AddressFilter::pending_request(const PortAction& master) const {
  switch (state) {
    case FilterState::Idle:
      return master;
    case FilterState::Committed:
      return committed_request;
    case FilterState::Waiting:
      return std::nullopt;
  }
  return std::nullopt;
}

PortAction AddressFilter::output_wires(const PortAction& master) const {
  switch (state) {
    case FilterState::Idle:
      return master;
    case FilterState::Committed:
      return committed_request;
    case FilterState::Waiting:
      return variant == FilterVariant::CommitBuffered ? committed_request : master;
  }
  return std::nullopt;
}

FilterStep filter_step(AddressFilter f, const PortAction& master, bool fabric_ready,
                       std::optional<Decision> decision) {
  FilterStep out;
  f.pulse_committed_valid = false;
  f.pulse_forwarded = false;
  f.pulse_policy_compliant = false;
  f.live_request = master;

  const bool allow = decision == Decision::Allow;
  auto forward = [&](const AddressRequest& fwd, const AddressRequest& approved) {
    out.forwarded = fwd;
    out.approved = approved;
    f.state = FilterState::Idle;
    f.committed_request.reset();
  };

  switch (f.state) {
    case FilterState::Idle:
      if (!master) break;
      if (allow) {
        f.pulse_policy_compliant = true;
        if (fabric_ready) {
          forward(*master, *master);
        } else {
          f.committed_request = master;
          f.state = FilterState::Waiting;
        }
      } else {
        f.committed_request = master;
        f.state = FilterState::Committed;
      }
      break;

    case FilterState::Committed:
      assert(f.committed_request);
      if (!decision) break;
      if (*decision == Decision::Deny) {
        out.dropped = true;
        f.state = FilterState::Idle;
        f.committed_request.reset();
      } else {
        f.pulse_policy_compliant = true;
        if (fabric_ready) {
          const AddressRequest req = *f.committed_request;
          forward(req, req);
        } else {
          f.state = FilterState::Waiting;
        }
      }
      break;

    case FilterState::Waiting:
      assert(f.committed_request);
      if (!fabric_ready) break;
      if (f.variant == FilterVariant::CommitBuffered) {
        const AddressRequest req = *f.committed_request;
        forward(req, req);
      } else if (master) {
        // Pass-through of whatever the master drives now; the approval was
        // for the buffered request.
        const AddressRequest approved = *f.committed_request;
        forward(*master, approved);
      }
      break;
  }

  f.pulse_forwarded = out.forwarded.has_value();
  f.pulse_committed_valid =
      f.state == FilterState::Committed || f.state == FilterState::Waiting;
  out.master_ack = out.forwarded.has_value() || out.dropped;
  out.filter = f;
  return out;
}

ChannelController make_channel(AccessKind kind, FilterVariant variant) {
  ChannelController c;
  c.kind = kind;
  c.filter.variant = variant;
  return c;
}

ChannelStep channel_step(ChannelController c, const RuleTable& table, const ChannelInputs& in) {
  ChannelStep out;
  out.desync = in.enforce_cmd && c.state != ChannelState::Wait;
  const PortAction pending = c.filter.pending_request(in.master);
  std::optional<Decision> to_filter;

  switch (c.state) {
    case ChannelState::Permit:
      if (!in.policy_busy && pending) {
        out.evaluated = table.decide(*pending);
        to_filter = Decision::Allow;
      }
      break;

    case ChannelState::Enforce:
      if (!in.policy_busy && pending) {
        out.evaluated = table.decide(*pending);
        if (*out.evaluated == Decision::Allow) {
          to_filter = Decision::Allow;
        } else {
          c.state = ChannelState::Request;
        }
      }
      break;

    case ChannelState::Request:
      assert(c.filter.committed_request);
      if (in.fsl_out_grant) {
        out.intr = encode_intr(c.filter.committed_request->addr, c.kind);
        c.state = ChannelState::Wait;
      }
      break;

    case ChannelState::Wait:
      if (in.enforce_cmd) c.state = ChannelState::Check;
      break;

    case ChannelState::Check: {
      if (in.policy_busy) break;
      if (!c.filter.committed_request) {
        c.state = ChannelState::Enforce;
        break;
      }
      const AddressRequest& blocked = *c.filter.committed_request;
      out.evaluated = table.decide(blocked);
      to_filter = out.evaluated;
      c.saved_id = blocked.id;
      if (c.kind == AccessKind::Read) c.saved_len = blocked.burst_len;
      if (*out.evaluated == Decision::Allow) {
        c.state = ChannelState::Resume;
        out.resumed_allow = true;
      } else {
        c.state = ChannelState::Respond;
        c.respond_beats_left = c.kind == AccessKind::Read ? blocked.burst_len : 0;
      }
      break;
    }

    case ChannelState::Respond: {
      assert(c.saved_id);
      Response resp{c.kind, *c.saved_id, ResponseKind::DecodeError, true};
      if (c.kind == AccessKind::Write) {
        c.state = ChannelState::Enforce;
      } else {
        if (c.respond_beats_left > 0) --c.respond_beats_left;
        resp.last = c.respond_beats_left == 0;
        if (resp.last) c.state = ChannelState::Resume;
      }
      out.response = resp;
      break;
    }

    case ChannelState::Resume:
      c.state = ChannelState::Enforce;
      break;
  }

  if (c.state == ChannelState::Enforce) {
    c.saved_id.reset();
    c.saved_len.reset();
    c.respond_beats_left = 0;
  }

  out.decision = to_filter;
  out.filter = filter_step(c.filter, in.master, in.fabric_ready, to_filter);
  c.filter = out.filter.filter;
  out.channel = c;
  return out;
}

Interposer::Interposer(const InterposerConfig& cfg)
    : table(cfg.capacity),
      read(make_channel(AccessKind::Read, cfg.variant)),
      write(make_channel(AccessKind::Write, cfg.variant)),
      register_slice(cfg.register_slice) {
  if (cfg.permit_mode) {
    read.state = ChannelState::Permit;
    write.state = ChannelState::Permit;
  }
}

PortAction Interposer::fabric_request(AccessKind k, const PortAction& master) const {
  const PortAction& slice = k == AccessKind::Read ? slice_r : slice_w;
  return channel(k).filter.output_wires(register_slice ? slice : master);
}

namespace {

ChannelReport report_for(const ChannelController& before, const PortAction& live,
                         const ChannelStep& s) {
  ChannelReport r;
  r.state_before = before.state;
  r.filter_before = before.filter.state;
  r.live = live;
  r.decision = s.decision;
  r.evaluated = s.evaluated;
  r.forwarded = s.filter.forwarded;
  r.approved = s.filter.approved;
  r.response = s.response;
  r.master_ack = s.filter.master_ack;
  r.dropped = s.filter.dropped;
  r.resumed_allow = s.resumed_allow;
  r.desync = s.desync;
  return r;
}

}  // namespace

InterposerOutputs Interposer::step(const InterposerInputs& in) {
  InterposerOutputs out;
  bool enforce_r = false;
  bool enforce_w = false;

  if (in.fsl_in) {
    if (auto cmd = try_decode_command(*in.fsl_in)) {
      out.command = cmd;
      if (const auto* nr = std::get_if<NewRuleCmd>(&*cmd)) {
        table.insert(rule_from(*nr));
        out.policy_busy = true;
      } else if (std::holds_alternative<FlushCmd>(*cmd)) {
        table.flush();
        out.policy_busy = true;
      } else {
        (std::get<EnforceCmd>(*cmd).channel == AccessKind::Read ? enforce_r : enforce_w) = true;
      }
    } else {
      out.malformed_command = true;
      ++malformed_count;
    }
  }

  const PortAction live_r = register_slice ? PortAction(slice_r) : in.master_r;
  const PortAction live_w = register_slice ? PortAction(slice_w) : in.master_w;

  // One outgoing word per cycle; the write channel wins a tie.
  const bool write_wants_link = write.state == ChannelState::Request;
  const ChannelInputs win{live_w, in.fabric_ready_w, enforce_w, out.policy_busy,
                          in.fsl_out_space};
  const ChannelInputs rin{live_r, in.fabric_ready_r, enforce_r, out.policy_busy,
                          in.fsl_out_space && !write_wants_link};

  ChannelStep sw = channel_step(write, table, win);
  ChannelStep sr = channel_step(read, table, rin);
  desync_count += static_cast<unsigned>(sw.desync) + static_cast<unsigned>(sr.desync);

  out.w = report_for(write, live_w, sw);
  out.r = report_for(read, live_r, sr);
  out.fsl_out = sw.intr ? sw.intr : sr.intr;

  write = sw.channel;
  read = sr.channel;

  if (register_slice) {
    auto advance = [](std::optional<AddressRequest>& slice, const PortAction& master,
                      ChannelReport& rep) {
      if (rep.master_ack) slice.reset();
      const bool captured = !slice && master.has_value();
      if (captured) slice = master;
      rep.master_ack = captured;
    };
    advance(slice_r, in.master_r, out.r);
    advance(slice_w, in.master_w, out.w);
  }
  return out;
}

InterposerCycle interposer_cycle(Interposer ip, const InterposerInputs& in) {
  InterposerOutputs out = ip.step(in);
  return InterposerCycle{std::move(ip), std::move(out)};
}

std::string_view to_string(FilterState s) {
  switch (s) {
    case FilterState::Idle: return "idle";
    case FilterState::Committed: return "committed";
    case FilterState::Waiting: return "waiting";
  }
  return "?";
}

std::string_view to_string(FilterVariant v) {
  return v == FilterVariant::Vulnerable ? "vulnerable" : "commit_buffered";
}

std::string_view to_string(ChannelState s) {
  switch (s) {
    case ChannelState::Permit: return "permit";
    case ChannelState::Enforce: return "enforce";
    case ChannelState::Request: return "request";
    case ChannelState::Wait: return "wait";
    case ChannelState::Check: return "check";
    case ChannelState::Respond: return "respond";
    case ChannelState::Resume: return "resume";
  }
  return "?";
}

std::optional<FilterVariant> parse_filter_variant(std::string_view text) {
  if (text == "vulnerable") return FilterVariant::Vulnerable;
  if (text == "commit_buffered" || text == "commit-buffered") return FilterVariant::CommitBuffered;
  return std::nullopt;
}

}  // namespace nocf
