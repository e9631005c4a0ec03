#include "nocf/master.hpp"

namespace nocf {

std::vector<std::uint8_t> MasterBehavior::write_data(const AddressRequest& req) {
  return std::vector<std::uint8_t>(std::size_t{req.burst_len} << req.burst_size_log2, 0);
}

ScriptedMaster::ScriptedMaster(std::vector<ScriptOp> ops) : ops_(std::move(ops)) {}

MasterOutput ScriptedMaster::present(std::uint64_t cycle) {
  // Issue in script order; an op waits for its channel to drain.
  while (next_ < ops_.size()) {
    const ScriptOp& op = ops_[next_];
    Channel& c = chan(op.request.kind);
    if (op.at > cycle || c.presenting || c.in_flight) break;
    c.presenting = next_++;
  }
  MasterOutput out;
  if (read_.presenting) out.read = ops_[*read_.presenting].request;
  if (write_.presenting) out.write = ops_[*write_.presenting].request;
  return out;
}

std::vector<std::uint8_t> ScriptedMaster::write_data(const AddressRequest& req) {
  const auto& c = write_;
  const auto idx = c.presenting ? c.presenting : c.in_flight;
  if (idx && ops_[*idx].request == req && !ops_[*idx].data.empty()) return ops_[*idx].data;
  return MasterBehavior::write_data(req);
}

void ScriptedMaster::feedback(std::uint64_t, const PortFeedback& fb) {
  if (fb.read_ack && read_.presenting) {
    read_.in_flight = read_.presenting;
    read_.presenting.reset();
  }
  if (fb.write_ack && write_.presenting) {
    write_.in_flight = write_.presenting;
    write_.presenting.reset();
  }
  for (const auto& r : fb.reads) reads_.push_back(r);
  for (const auto& resp : fb.responses) {
    if (!resp.last) continue;
    Channel& c = chan(resp.channel);
    if (!c.in_flight) continue;
    c.in_flight.reset();
    ++completed_;
    if (resp.kind == ResponseKind::DecodeError) ++errors_;
  }
}

bool ScriptedMaster::done() const {
  return next_ == ops_.size() && !read_.presenting && !read_.in_flight && !write_.presenting &&
         !write_.in_flight;
}

}  // namespace nocf
