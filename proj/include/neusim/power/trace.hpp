#pragma once

// Post-processing power trace: activity from a finished run is binned into
// fixed power-trace intervals (PTIs), turned into a utilization per power node
// and evaluated with the closed-form node model.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/power/types.hpp"

namespace neusim::power {

/// `*` matches any run of characters (including '/'); everything else is literal.
bool glob_match(std::string_view pattern, std::string_view text);

struct Interval {
  sim::SimTime t0 = 0;
  sim::SimTime t1 = 0;
};

/// Back-to-back intervals of `pti_cycles` covering [0, duration); the last one
/// may be shorter. A zero duration yields no intervals.
std::vector<Interval> make_intervals(sim::SimTime duration, std::uint64_t pti_cycles);

/// Activity of one model apportioned linearly over `intervals`.
std::vector<double> collect_activity(const ActivityModel& model, const std::vector<Interval>& intervals);

/// Largest activity a model can log in `cycles` reference cycles.
double max_activity(const ActivityModel& model, double reference_mhz, sim::SimTime cycles);

struct NodeTrace {
  std::string path;   // slash-joined names from the root
  std::size_t depth = 0;
  std::size_t end = 0;  // one past the last pre-order descendant
  std::vector<std::string> models;  // bound activity models
  double freq_hz = 0.0;
  double v_adj = 0.0;
  std::vector<double> utilization;
  std::vector<double> p_lkg;    // node-local
  std::vector<double> p_dyn;    // node-local
  std::vector<double> p_total;  // subtree roll-up
};

struct PowerTrace {
  double reference_mhz = 0.0;
  std::vector<Interval> intervals;
  std::vector<NodeTrace> nodes;  // pre-order; nodes[0] is the root

  double interval_seconds(std::size_t k) const;
  double duration_seconds() const;
  /// Node-local power of node `n` in interval `k`.
  double local(std::size_t n, std::size_t k) const { return nodes[n].p_lkg[k] + nodes[n].p_dyn[k]; }
  double energy_j(std::size_t node = 0) const;
  double average_w(std::size_t node = 0) const;
  double peak_w(std::size_t node = 0) const;
};

/// Throws PowerError for unknown clocks, bindings that match nothing,
/// utilization above 1 and lookups outside the characterization tables.
PowerTrace power_trace(const PowerConfig& cfg, const config::Frequencies& freq_mhz, const ActivityLog& log,
                       sim::SimTime duration, std::uint64_t pti_cycles);

}  // namespace neusim::power
