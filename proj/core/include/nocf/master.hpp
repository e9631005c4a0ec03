#pragma once

// Master-side behaviour interface used by the system scheduler, plus the
// ordinary (protocol-compliant) scripted master.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "nocf/bus.hpp"

namespace nocf {

struct MasterOutput {
  PortAction read;
  PortAction write;
};

struct ReadReturn {
  AddressRequest request;
  std::vector<std::uint8_t> data;
};

/// Everything a master port observes at the end of a cycle.
struct PortFeedback {
  bool read_ack = false;
  bool write_ack = false;
  std::vector<Response> responses;
  std::vector<ReadReturn> reads;
};

class MasterBehavior {
 public:
  virtual ~MasterBehavior() = default;

  virtual MasterOutput present(std::uint64_t cycle) = 0;

  /// Data bytes accompanying a forwarded write burst. Slaves write as many
  /// bytes as returned, starting at the burst address.
  virtual std::vector<std::uint8_t> write_data(const AddressRequest& req);

  virtual void feedback(std::uint64_t cycle, const PortFeedback& fb) { (void)cycle, (void)fb; }

  /// True once the behaviour has nothing left to do.
  virtual bool done() const { return true; }
};

class IdleMaster final : public MasterBehavior {
 public:
  MasterOutput present(std::uint64_t) override { return {}; }
};

struct ScriptOp {
  std::uint64_t at = 0;  // earliest issue cycle
  AddressRequest request;
  std::vector<std::uint8_t> data;  // write payload
};

/// Issues its ops in order, one outstanding per channel, holding each
/// request until the interposer acknowledges it.
class ScriptedMaster final : public MasterBehavior {
 public:
  explicit ScriptedMaster(std::vector<ScriptOp> ops);

  MasterOutput present(std::uint64_t cycle) override;
  std::vector<std::uint8_t> write_data(const AddressRequest& req) override;
  void feedback(std::uint64_t cycle, const PortFeedback& fb) override;
  bool done() const override;

  std::uint64_t completed() const { return completed_; }
  std::uint64_t errors() const { return errors_; }
  const std::vector<ReadReturn>& reads() const { return reads_; }

 private:
  struct Channel {
    std::optional<std::size_t> presenting;  // op index on the wires
    std::optional<std::size_t> in_flight;   // acked, awaiting completion
  };
  Channel& chan(AccessKind k) { return k == AccessKind::Read ? read_ : write_; }

  std::vector<ScriptOp> ops_;
  std::size_t next_ = 0;
  Channel read_;
  Channel write_;
  std::uint64_t completed_ = 0;
  std::uint64_t errors_ = 0;
  std::vector<ReadReturn> reads_;
};

/// Drives exactly the scripted wires each cycle, ignoring acknowledgements.
/// Used to replay model-checker counterexamples.
class WireScriptMaster final : public MasterBehavior {
 public:
  explicit WireScriptMaster(std::vector<MasterOutput> per_cycle) : script_(std::move(per_cycle)) {}
  MasterOutput present(std::uint64_t cycle) override {
    return cycle < script_.size() ? script_[cycle] : MasterOutput{};
  }
  bool done() const override { return true; }

 private:
  std::vector<MasterOutput> script_;
};

}  // namespace nocf
