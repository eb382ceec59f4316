#pragma once

// DDR device model: banks with one open row each, per-burst command timing
// (hit / miss / closed bank), a shared data bus, optional closed-page policy
// and periodic all-bank refresh.
//
// Accesses are reservations: a call computes the completion time from the
// current bank/bus state and commits it, so callers issue them in simulated
// time order.

#include <cstdint>
#include <optional>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/timebase.hpp"

namespace neusim::memory {

struct DdrAddress {
  std::uint32_t bank = 0;
  std::uint64_t row = 0;
  std::uint64_t col = 0;

  bool operator==(const DdrAddress&) const = default;
};

/// Page-granular bank interleaving (row : bank : column).
DdrAddress ddr_map_address(std::uint64_t addr, const config::DdrParams& p);

enum class RowState { Hit, Miss, Closed };

struct DdrAccess {
  sim::SimTime done = 0;  // last data beat
  std::uint64_t bursts = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t closed = 0;
};

class Ddr {
 public:
  Ddr(const config::DdrParams& params, Clock clock, ActivityLog* log = nullptr, std::size_t model = 0);

  DdrAccess access(std::uint64_t addr, std::uint64_t bytes, sim::SimTime at);

  /// Command-to-data cycles for a burst in the given row state (reference clock).
  sim::SimTime command_cycles(RowState s) const;
  sim::SimTime burst_cycles() const { return transfer_; }
  std::uint64_t bytes_moved() const { return bytes_; }

 private:
  struct Bank {
    std::optional<std::uint64_t> open_row;
    sim::SimTime ready = 0;
    std::uint64_t refresh_epoch = 0;
  };

  // Pushes `t` out of any refresh window and closes rows refreshed since the
  // bank was last used.
  sim::SimTime after_refresh(Bank& bank, sim::SimTime t) const;

  config::DdrParams params_;
  Clock clock_;
  sim::SimTime tCL_, tRCD_, tRP_, transfer_, refresh_interval_, refresh_penalty_;
  std::vector<Bank> banks_;
  sim::SimTime bus_free_ = 0;
  std::uint64_t bytes_ = 0;
  ActivityLog* log_;
  std::size_t model_;
};

}  // namespace neusim::memory
