#pragma once

// Multichannel DMA. A descriptor is split into requests (contiguous runs
// chunked at max_request_bytes); a channel issues one request per
// ceil(bytes / channel bw) cycles with at most `outstanding` in flight. A
// request reads its source, crosses the NOC to each destination port and is
// written there.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/memory/cb.hpp"
#include "neusim/memory/ddr.hpp"
#include "neusim/memory/noc.hpp"
#include "neusim/sim/kernel.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::memory {

struct DmaRequest {
  std::uint64_t src_offset = 0;  // bytes from the source tensor base
  std::uint64_t dst_offset = 0;
  std::uint64_t src_bytes = 0;
  std::uint64_t dst_bytes = 0;

  bool operator==(const DmaRequest&) const = default;
};

/// Throws WorkloadError for a zero-byte descriptor.
std::vector<DmaRequest> dma_split_descriptor(const workload::DmaDescriptor& d, std::uint64_t max_request_bytes);

/// Destination tiles of a descriptor (broadcast list, else the tensor's tile).
std::vector<std::uint32_t> dma_destinations(const workload::DmaDescriptor& d, const workload::TensorDesc& dst);

struct DmaResult {
  sim::SimTime first_issue = 0;
  sim::SimTime last_completion = 0;
  std::uint64_t requests = 0;
  std::uint64_t src_bytes = 0;
  std::uint64_t dst_bytes = 0;  // counted once per request, not per broadcast copy

  sim::SimTime cycles() const { return last_completion - first_issue; }
  /// Destination bytes per reference cycle.
  double achieved_bw() const { return cycles() ? static_cast<double>(dst_bytes) / static_cast<double>(cycles()) : 0.0; }
};

class Dma {
 public:
  Dma(sim::Environment& env, const config::PlatformConfig& cfg, const workload::TaskGraph& graph, Noc& noc, Ddr& ddr,
      std::vector<ComputeBuffer>& cbs, ActivityLog* log = nullptr);
  ~Dma();

  /// Runs one DMA task on its channel; returns when every request completed.
  sim::Task execute(const workload::DmaTask& task, std::string name, DmaResult& result);

  sim::SimTime issue_cycles(std::uint64_t bytes) const;

 private:
  struct Channel;
  struct Request;

  sim::Environment* env_;
  const config::PlatformConfig* cfg_;
  const workload::TaskGraph* graph_;
  Noc* noc_;
  Ddr* ddr_;
  std::vector<ComputeBuffer>* cbs_;
  ActivityLog* log_;
  Clock clock_;
  std::size_t ddr_port_;
  std::vector<std::size_t> cb_ports_;
  std::vector<std::unique_ptr<Channel>> channels_;
};

}  // namespace neusim::memory
