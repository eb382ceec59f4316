#pragma once

// Simulation-time DPU and DSP engines. Each task runs its blocks through the
// pipeline, reserving the engine's CB read/write ports per block, so port
// contention with DMA traffic stretches load and store stages.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/engines/compute.hpp"
#include "neusim/engines/dsp_curves.hpp"
#include "neusim/memory/cb.hpp"
#include "neusim/sim/kernel.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::engines {

using Meta = std::vector<std::pair<std::string, std::string>>;

struct ComputeStats {
  std::uint64_t blocks = 0;
  std::uint64_t macs = 0;
  std::uint64_t elems = 0;
};

class DpuEngine {
 public:
  /// `index` is the engine's position among the tile's compute engines.
  DpuEngine(sim::Environment& env, const config::PlatformConfig& cfg, const workload::TaskGraph& graph,
            memory::ComputeBuffer& cb, std::uint32_t index, ActivityLog* log, std::size_t model);

  sim::Task run(const workload::ComputeTask& task, Meta& meta, ComputeStats& stats);

 private:
  sim::Environment* env_;
  const config::PlatformConfig* cfg_;
  const workload::TaskGraph* graph_;
  memory::ComputeBuffer* cb_;
  std::uint32_t read_port_, write_port_;
  ActivityLog* log_;
  std::size_t model_;
};

class DspEngine {
 public:
  DspEngine(sim::Environment& env, const config::PlatformConfig& cfg, const workload::TaskGraph& graph,
            memory::ComputeBuffer& cb, std::uint32_t index, const DspCurveTable& curves, ActivityLog* log,
            std::size_t model);

  sim::Task run(const workload::ComputeTask& task, Meta& meta, ComputeStats& stats);

 private:
  sim::Environment* env_;
  const config::PlatformConfig* cfg_;
  const workload::TaskGraph* graph_;
  memory::ComputeBuffer* cb_;
  std::uint32_t read_port_, write_port_;
  const DspCurveTable* curves_;
  ActivityLog* log_;
  std::size_t model_;
};

}  // namespace neusim::engines
