#include "neusim/memory/ddr.hpp"

#include <algorithm>

namespace neusim::memory {

DdrAddress ddr_map_address(std::uint64_t addr, const config::DdrParams& p) {
  return {static_cast<std::uint32_t>((addr / p.page_bytes) % p.banks), addr / (p.page_bytes * p.banks),
          addr % p.page_bytes};
}

Ddr::Ddr(const config::DdrParams& params, Clock clock, ActivityLog* log, std::size_t model)
    : params_(params),
      clock_(clock),
      tCL_(clock.cycles(params.tCL)),
      tRCD_(clock.cycles(params.tRCD)),
      tRP_(clock.cycles(params.tRP)),
      transfer_(clock.transfer(params.burst_bytes, params.bw_bytes_per_cycle)),
      refresh_interval_(clock.cycles(params.refresh_interval)),
      refresh_penalty_(clock.cycles(params.refresh_penalty)),
      banks_(params.banks),
      log_(log),
      model_(model) {}

sim::SimTime Ddr::command_cycles(RowState s) const {
  switch (s) {
    case RowState::Hit: return tCL_;
    case RowState::Miss: return tRP_ + tRCD_ + tCL_;
    case RowState::Closed: return tRCD_ + tCL_;
  }
  return 0;
}

sim::SimTime Ddr::after_refresh(Bank& bank, sim::SimTime t) const {
  if (refresh_interval_ == 0) return t;
  // Refresh k occupies [k*I, k*I + penalty) for k >= 1.
  std::uint64_t epoch = t / refresh_interval_;
  if (epoch >= 1 && t < epoch * refresh_interval_ + refresh_penalty_) t = epoch * refresh_interval_ + refresh_penalty_;
  if (epoch > bank.refresh_epoch) {
    bank.open_row.reset();
    bank.refresh_epoch = epoch;
  }
  return t;
}

DdrAccess Ddr::access(std::uint64_t addr, std::uint64_t bytes, sim::SimTime at) {
  DdrAccess result;
  result.done = at;
  if (bytes == 0) return result;
  const std::uint64_t burst = params_.burst_bytes;
  const std::uint64_t end = addr + bytes;
  for (std::uint64_t b = addr / burst; b * burst < end; ++b) {
    const std::uint64_t lo = std::max(addr, b * burst);
    const std::uint64_t hi = std::min(end, (b + 1) * burst);
    const auto where = ddr_map_address(lo, params_);
    auto& bank = banks_[where.bank];
    sim::SimTime cmd = after_refresh(bank, std::max(at, bank.ready));
    RowState state;
    if (!bank.open_row) {
      state = RowState::Closed;
      ++result.closed;
    } else if (*bank.open_row == where.row) {
      state = RowState::Hit;
      ++result.hits;
    } else {
      state = RowState::Miss;
      ++result.misses;
    }
    const auto data_start = std::max(cmd + command_cycles(state), bus_free_);
    const auto data_end = data_start + transfer_;
    bus_free_ = data_end;
    // Column commands to an open row pipeline: the next one may issue one
    // burst time after this one's CAS.
    bank.ready = data_start - tCL_ + transfer_;
    bank.open_row = where.row;
    if (params_.page_policy == config::PagePolicy::Closed) {
      bank.ready = data_end + tRP_;
      bank.open_row.reset();
    }
    bytes_ += hi - lo;
    if (log_) log_->record(model_, data_start, data_end, hi - lo);
    result.done = std::max(result.done, data_end);
    ++result.bursts;
  }
  return result;
}

}  // namespace neusim::memory
