#include "nocf/kernel.hpp"

#include <algorithm>
#include <cstdio>

namespace nocf {
namespace {

bool overlaps(const GrantEntry& a, const GrantEntry& b) {
  const std::uint64_t a_lo = a.base, a_hi = a_lo + decode_size(a.size);
  const std::uint64_t b_lo = b.base, b_hi = b_lo + decode_size(b.size);
  return a_lo < b_hi && b_lo < a_hi;
}

std::string hex(Address a) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", a);
  return buf;
}

}  // namespace

GrantMap::GrantMap(std::vector<GrantEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!is_aligned(e.base, e.size)) {
      throw GrantMapError("grant " + std::to_string(i) + " for " + e.master + ": base " +
                          hex(e.base) + " not aligned to size code " +
                          std::to_string(e.size.code()));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[j].master == e.master && overlaps(entries_[j], e)) {
        throw GrantMapError("grant " + std::to_string(i) + " for " + e.master +
                            " overlaps grant " + std::to_string(j));
      }
    }
  }
}

std::optional<RegionGrant> GrantMap::calculate_region(const std::string& master,
                                                      std::uint32_t page,
                                                      AccessKind kind) const {
  const Address addr = page << 12;
  for (const auto& e : entries_) {
    if (e.master == master && e.contains(addr)) {
      // Entries of one master are disjoint, so this is the only candidate.
      if (!e.permits(kind)) return std::nullopt;
      return RegionGrant{e.base, e.size, e.allow_read, e.allow_write};
    }
  }
  return std::nullopt;
}

std::vector<FslWord> reply_commands(const IntrInfo& intr,
                                    const std::optional<RegionGrant>& grant) {
  std::vector<FslWord> words;
  if (grant) {
    words.push_back(encode_command(
        NewRuleCmd{grant->base >> 12, grant->size, grant->allow_read, grant->allow_write}));
  }
  words.push_back(encode_command(EnforceCmd{intr.kind}));
  return words;
}

std::vector<FslWord> abstract_reply(const IntrInfo& intr, bool grant) {
  std::optional<RegionGrant> g;
  if (grant) {
    g = RegionGrant{intr.page_base(), SizeCode(0), intr.kind == AccessKind::Read,
                    intr.kind == AccessKind::Write};
  }
  return reply_commands(intr, g);
}

IntegrityKernel::IntegrityKernel(GrantMap grants, unsigned latency)
    : grants_(std::move(grants)), latency_(latency) {}

std::size_t IntegrityKernel::add_link(std::string master) {
  link_master_.push_back(std::move(master));
  pending_.emplace_back();
  return link_master_.size() - 1;
}

std::vector<FslWord> IntegrityKernel::handle_intr(std::size_t link, IntrWord w) {
  ++stats_.interrupts;
  const auto info = try_decode_intr(w);
  if (!info) {
    ++stats_.malformed;
    ++stats_.denials;
    const AccessKind k = (w.raw & 1u) ? AccessKind::Read : AccessKind::Write;
    return {encode_command(EnforceCmd{k})};
  }
  const auto grant = calculate_region(link_master_.at(link), info->page, info->kind);
  ++(grant ? stats_.grants : stats_.denials);
  return reply_commands(*info, grant);
}

std::vector<FslWord> IntegrityKernel::scripted_reply(std::size_t link, IntrWord w, bool grant) {
  (void)link;
  ++stats_.interrupts;
  const auto info = try_decode_intr(w);
  if (!info) {
    ++stats_.malformed;
    ++stats_.denials;
    return {encode_command(EnforceCmd{(w.raw & 1u) ? AccessKind::Read : AccessKind::Write})};
  }
  ++(grant ? stats_.grants : stats_.denials);
  return abstract_reply(*info, grant);
}

void IntegrityKernel::set_scripted(std::vector<ScriptedReply> script) {
  mode_ = KernelMode::Scripted;
  script_.clear();
  for (const auto& s : script) script_.emplace(s.cycle, s);
}

std::size_t IntegrityKernel::pending() const {
  std::size_t n = 0;
  for (const auto& q : pending_) n += q.size();
  return n;
}

void IntegrityKernel::service(std::uint64_t cycle, std::vector<FifoLink<IntrWord>>& uplinks,
                              std::vector<FifoLink<FslWord>>& downlinks) {
  for (std::size_t l = 0; l < uplinks.size() && l < pending_.size(); ++l) {
    if (auto w = uplinks[l].pop()) pending_[l].push_back(Pending{*w, cycle + latency_});
  }

  if (mode_ == KernelMode::Scripted) {
    auto [lo, hi] = script_.equal_range(cycle);
    for (auto it = lo; it != hi; ++it) {
      const ScriptedReply& s = it->second;
      if (s.link >= pending_.size() || pending_[s.link].empty()) continue;
      const Pending p = pending_[s.link].front();
      pending_[s.link].pop_front();
      for (FslWord w : scripted_reply(s.link, p.word, s.grant)) downlinks[s.link].try_push(w);
    }
    return;
  }

  for (std::size_t l = 0; l < pending_.size(); ++l) {
    auto& q = pending_[l];
    while (!q.empty() && q.front().due <= cycle) {
      // Two words at most; hold the interrupt until both fit.
      if (!downlinks[l].has_space(2)) break;
      const Pending p = q.front();
      q.pop_front();
      for (FslWord w : handle_intr(l, p.word)) downlinks[l].try_push(w);
    }
  }
}

}  // namespace nocf
