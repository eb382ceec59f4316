#pragma once

// Block-level cost models of the two compute engines.
//
// DPU: the task's output region is cut into data blocks (multiples of the
// selected stencil) that flow through load -> MAC -> post-process -> store.
// DSP: the region is cut into blocks of pipeline_block SIMD vectors that flow
// through load -> compute -> store, compute costed by the kernel curve.
//
// A pipelined task takes the full latency of its first block plus, for each
// later block, the latency of its slowest stage.

#include <array>
#include <cstdint>
#include <vector>

#include "neusim/config.hpp"
#include "neusim/engines/dsp_curves.hpp"
#include "neusim/timebase.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::engines {

/// PE utilization of a stencil on an ox-by-oy output.
double stencil_utilization(const config::Stencil& s, std::uint32_t ox, std::uint32_t oy, const config::DpuArray& a);

/// Highest utilization; ties go to larger tile_oc, then to the first listed.
config::Stencil select_stencil(std::uint32_t ox, std::uint32_t oy, const config::DpuArray& array,
                               const std::vector<config::Stencil>& set);

struct DataBlock {
  workload::Region region;  // output sub-range
  std::uint64_t input_bytes = 0;
  std::uint64_t weight_bytes = 0;
  std::uint64_t output_bytes = 0;
  std::uint64_t out_elems = 0;
  std::uint64_t macs = 0;
  std::uint32_t lanes_x = 1;  // stencil extents in use after edge clipping
  std::uint32_t lanes_y = 1;
};

/// Bytes and MACs of one DPU block.
DataBlock dpu_block(const std::vector<workload::TensorDesc>& tensors, const workload::Operator& op,
                    const workload::Region& region, const config::Stencil& stencil);

/// Output-block extents (x, y, oc): greedy multiples of the stencil along x,
/// then y, then oc while input + output bytes fit `block_buffer_bytes`.
std::array<std::uint32_t, 3> dpu_block_extent(const std::vector<workload::TensorDesc>& tensors,
                                              const workload::Operator& op, const workload::Region& region,
                                              const config::Stencil& stencil, std::uint64_t block_buffer_bytes);

/// Blocks of a region in loop order: oc outermost, then y, then x.
std::vector<DataBlock> dpu_partition(const std::vector<workload::TensorDesc>& tensors, const workload::Operator& op,
                                     const workload::Region& region, const config::PlatformConfig& cfg);

enum Stage : std::size_t { kLoad = 0, kCompute = 1, kPost = 2, kStore = 3 };
using StageCycles = std::array<std::uint64_t, 4>;

/// Uncontended stage latencies of a DPU block, in reference cycles.
StageCycles dpu_stage_cycles(const DataBlock& block, const workload::Operator& op, const config::PlatformConfig& cfg);

struct DspBlock {
  std::uint64_t elems = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
};

std::vector<DspBlock> dsp_partition(const std::vector<workload::TensorDesc>& tensors, const workload::Operator& op,
                                    const workload::Region& region, const config::PlatformConfig& cfg);

/// Uncontended stages (post is always 0), in reference cycles.
StageCycles dsp_stage_cycles(const DspBlock& block, const DspKernelCurve& curve, const config::PlatformConfig& cfg);

/// Sum of the first block's stages plus the slowest stage of every later block.
std::uint64_t pipeline_cycles(const std::vector<StageCycles>& blocks);

}  // namespace neusim::engines
