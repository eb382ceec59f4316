#pragma once

// One complete simulation: builds the platform models for a configuration,
// runs a task graph to completion and returns timing, trace and activity.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/engines/dsp_curves.hpp"
#include "neusim/sched/scheduler.hpp"
#include "neusim/trace.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim {

struct EngineInfo {
  std::string name;  // also its trace track
  config::EngineClass engine_class = config::EngineClass::Dpu;
  sim::SimTime busy = 0;  // summed task durations
};

struct RunResult {
  sim::SimTime cycles = 0;  // last task completion, reference cycles
  double reference_mhz = 0.0;
  Trace trace;
  ActivityLog activity;
  std::vector<EngineInfo> engines;
  std::vector<sched::TaskTiming> timings;
  std::vector<std::optional<sim::SimTime>> barrier_fire;
  std::uint64_t fired_events = 0;
  std::uint64_t event_hash = 0;  // FNV-1a over the (time, pid, kind) event log
  std::uint64_t macs = 0;
  std::uint64_t dsp_elems = 0;
  std::uint64_t ddr_bytes = 0;
  std::uint64_t dma_bytes = 0;

  double seconds() const { return static_cast<double>(cycles) / (reference_mhz * 1e6); }
};

/// Runs `graph` on the platform of `cfg`. DSP curves come from `curves` when
/// given, otherwise from `cfg.platform.dsp_kernels`. Throws DeadlockError when
/// the run drains with incomplete tasks and SimulationError when it hits
/// `sim.run_limit` first.
RunResult simulate(const config::SimConfig& cfg, const workload::TaskGraph& graph,
                   const engines::DspCurveTable* curves = nullptr);

}  // namespace neusim
