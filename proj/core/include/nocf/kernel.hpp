#pragma once

// Integrity kernel model: turns interrupt words from interposers into policy
// commands using a per-master grant map.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nocf/codec.hpp"
#include "nocf/fifo_link.hpp"
#include "nocf/policy.hpp"

namespace nocf {

struct GrantEntry {
  std::string master;
  Address base = 0;
  SizeCode size;
  bool allow_read = false;
  bool allow_write = false;

  bool contains(Address a) const { return (a & region_mask(size)) == base; }
  bool permits(AccessKind k) const { return k == AccessKind::Read ? allow_read : allow_write; }
};

struct RegionGrant {
  Address base = 0;
  SizeCode size;
  bool allow_read = false;
  bool allow_write = false;
  friend bool operator==(const RegionGrant&, const RegionGrant&) = default;
};

class GrantMapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Table-driven region lookup. Entries of one master never overlap, so a
/// page lies in at most one of that master's entries.
class GrantMap {
 public:
  GrantMap() = default;
  /// Throws GrantMapError on an unaligned entry or overlapping entries of
  /// the same master.
  explicit GrantMap(std::vector<GrantEntry> entries);

  const std::vector<GrantEntry>& entries() const { return entries_; }

  std::optional<RegionGrant> calculate_region(const std::string& master, std::uint32_t page,
                                              AccessKind kind) const;

 private:
  std::vector<GrantEntry> entries_;
};

struct KernelStats {
  std::uint64_t interrupts = 0;
  std::uint64_t grants = 0;
  std::uint64_t denials = 0;
  std::uint64_t malformed = 0;
  friend bool operator==(const KernelStats&, const KernelStats&) = default;
};

/// Commands the kernel sends for one interrupt: NewRule (when granted)
/// followed by the enforce command for the faulting channel.
std::vector<FslWord> reply_commands(const IntrInfo& intr, const std::optional<RegionGrant>& grant);

/// Reply used where the kernel is abstracted to a bare grant/deny choice:
/// a grant covers exactly the faulting 4 KiB page for the faulting access kind.
std::vector<FslWord> abstract_reply(const IntrInfo& intr, bool grant);

enum class KernelMode : std::uint8_t { GrantMap, Scripted };

struct ScriptedReply {
  std::uint64_t cycle = 0;
  std::size_t link = 0;
  bool grant = false;
};

class IntegrityKernel {
 public:
  IntegrityKernel() = default;
  IntegrityKernel(GrantMap grants, unsigned latency);

  /// Registers the interposer link for `master`; returns its link id.
  std::size_t add_link(std::string master);
  std::size_t link_count() const { return link_master_.size(); }
  const std::string& link_master(std::size_t link) const { return link_master_.at(link); }

  unsigned latency() const { return latency_; }
  const GrantMap& grants() const { return grants_; }
  const KernelStats& stats() const { return stats_; }

  std::optional<RegionGrant> calculate_region(const std::string& master, std::uint32_t page,
                                              AccessKind kind) const {
    return grants_.calculate_region(master, page, kind);
  }

  /// Decodes one interrupt word from `link` and returns the commands for it.
  /// A malformed word yields no NewRule; the kernel still answers with an
  /// enforce for the channel named in bit 0 so the blocked request is
  /// re-checked against the unchanged policy.
  std::vector<FslWord> handle_intr(std::size_t link, IntrWord w);

  void set_scripted(std::vector<ScriptedReply> script);
  KernelMode mode() const { return mode_; }

  /// One scheduler phase: drain at most one interrupt word per uplink, then
  /// answer due interrupts in link order while the downlink has room.
  void service(std::uint64_t cycle, std::vector<FifoLink<IntrWord>>& uplinks,
               std::vector<FifoLink<FslWord>>& downlinks);

  std::size_t pending() const;

 private:
  struct Pending {
    IntrWord word;
    std::uint64_t due = 0;
  };

  std::vector<FslWord> scripted_reply(std::size_t link, IntrWord w, bool grant);

  GrantMap grants_;
  unsigned latency_ = 3;
  std::vector<std::string> link_master_;
  std::vector<std::deque<Pending>> pending_;
  KernelStats stats_;
  KernelMode mode_ = KernelMode::GrantMap;
  std::multimap<std::uint64_t, ScriptedReply> script_;
};

}  // namespace nocf
