#pragma once

// Conversion of engine-local cycle counts to reference-clock cycles.

#include <cmath>
#include <cstdint>

#include "neusim/sim/kernel.hpp"

namespace neusim {

class Clock {
 public:
  Clock() = default;
  Clock(double own_mhz, double ref_mhz) : own_(own_mhz), ref_(ref_mhz) {}

  double own_mhz() const { return own_; }
  double ref_mhz() const { return ref_; }

  /// ceil(c * ref / own); the identity when both clocks match.
  sim::SimTime cycles(std::uint64_t c) const {
    if (own_ == ref_) return c;
    return round_up(static_cast<double>(c) * ref_ / own_);
  }

  /// Reference cycles to move `bytes` at `bw` bytes per own cycle.
  sim::SimTime transfer(std::uint64_t bytes, double bw) const {
    if (bytes == 0) return 0;
    return round_up(static_cast<double>(bytes) * ref_ / (bw * own_));
  }

  /// Own-clock capability per reference cycle.
  double per_ref_cycle(double per_own_cycle) const { return per_own_cycle * own_ / ref_; }

 private:
  // Ceil that ignores representation noise just above an integer.
  static sim::SimTime round_up(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) return static_cast<sim::SimTime>(r);
    return static_cast<sim::SimTime>(std::ceil(x));
  }

  double own_ = 1.0;
  double ref_ = 1.0;
};

}  // namespace neusim
