#pragma once

// Per-tile compute buffer: P independent ports, each serving one access at a
// time at `bw_bytes_per_cycle`, plus a fixed access latency.

#include <cstdint>
#include <utility>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/timebase.hpp"

namespace neusim::memory {

struct PortGrant {
  sim::SimTime start = 0;  // port occupancy begins
  sim::SimTime end = 0;    // port occupancy ends
  sim::SimTime ready = 0;  // data available (end + latency)
};

class ComputeBuffer {
 public:
  ComputeBuffer(const config::CbParams& params, Clock clock, ActivityLog* log = nullptr, std::size_t model = 0);

  /// Reserves `port` for `bytes`, starting no earlier than `at`.
  PortGrant access(std::uint32_t port, sim::SimTime at, std::uint64_t bytes);
  /// Same on whichever port frees up first (lowest index on ties).
  PortGrant access_any(sim::SimTime at, std::uint64_t bytes);

  std::uint32_t ports() const { return static_cast<std::uint32_t>(busy_until_.size()); }
  sim::SimTime occupancy(std::uint64_t bytes) const { return clock_.transfer(bytes, params_.bw_bytes_per_cycle); }
  sim::SimTime latency() const { return latency_; }

  /// (read port, write port) of the e-th compute engine of a tile.
  static std::pair<std::uint32_t, std::uint32_t> engine_ports(std::uint32_t engine, std::uint32_t ports) {
    return {(2 * engine) % ports, (2 * engine + 1) % ports};
  }

 private:
  config::CbParams params_;
  Clock clock_;
  sim::SimTime latency_;
  std::vector<sim::SimTime> busy_until_;
  ActivityLog* log_;
  std::size_t model_;
};

}  // namespace neusim::memory
