#pragma once

// Run artifacts: browser timeline, summary CSV, power-trace CSV.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "neusim/config.hpp"
#include "neusim/power/trace.hpp"
#include "neusim/simulator.hpp"

namespace neusim::report {

inline constexpr std::string_view kSummarySchema = "neusim-summary/1";
inline constexpr std::string_view kPowerSchema = "neusim-power/1";
inline constexpr std::string_view kSweepSchema = "neusim-sweep/1";

/// Chrome trace-event JSON: one complete ("X") event per trace event,
/// timestamps in microseconds, one thread per track.
void write_timeline(std::ostream& out, const Trace& trace, double reference_mhz);

struct Metric {
  std::string name;
  std::string value;
  std::string unit;
};

struct Summary {
  std::vector<Metric> metrics;

  const Metric* find(const std::string& name) const;
  /// Numeric value of a metric; throws std::out_of_range when absent.
  double number(const std::string& name) const;
};

/// Latency, throughput, per-engine busy fractions, achieved DDR bandwidth and,
/// when `power` is given, average/peak power and energy.
Summary summarize(const config::SimConfig& cfg, const RunResult& run, const power::PowerTrace* power = nullptr);

/// `metric,value,unit` with a leading `schema,<version>,` row.
void write_summary_csv(std::ostream& out, const Summary& summary);

/// `pti_index,node_path,p_lkg_w,p_dyn_w,p_total_w`; every column is the
/// subtree roll-up of the node.
void write_power_csv(std::ostream& out, const power::PowerTrace& trace);

/// Power trace for a finished run when `sim.power_enabled` is set, otherwise
/// nullopt. Throws ConfigError when power is enabled without a power section
/// or a positive `sim.pti_cycles`.
std::optional<power::PowerTrace> evaluate_power(const config::SimConfig& cfg, const RunResult& run);

/// Shortest round-trip decimal for doubles; used by every CSV writer.
std::string format_number(double v);

}  // namespace neusim::report
