#include "neusim/memory/cb.hpp"

#include <algorithm>

namespace neusim::memory {

ComputeBuffer::ComputeBuffer(const config::CbParams& params, Clock clock, ActivityLog* log, std::size_t model)
    : params_(params),
      clock_(clock),
      latency_(clock.cycles(params.latency)),
      busy_until_(params.ports, 0),
      log_(log),
      model_(model) {}

PortGrant ComputeBuffer::access(std::uint32_t port, sim::SimTime at, std::uint64_t bytes) {
  if (bytes == 0) return {at, at, at};
  auto& busy = busy_until_.at(port);
  const auto start = std::max(at, busy);
  const auto end = start + occupancy(bytes);
  busy = end;
  if (log_) log_->record(model_, start, end, bytes);
  return {start, end, end + latency_};
}

PortGrant ComputeBuffer::access_any(sim::SimTime at, std::uint64_t bytes) {
  std::uint32_t best = 0;
  for (std::uint32_t p = 1; p < ports(); ++p) {
    if (std::max(at, busy_until_[p]) < std::max(at, busy_until_[best])) best = p;
  }
  return access(best, at, bytes);
}

}  // namespace neusim::memory
