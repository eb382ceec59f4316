#include "neusim/engines/compute.hpp"

#include <algorithm>
#include <numeric>

namespace neusim::engines {

using workload::kC;
using workload::kH;
using workload::kN;
using workload::kW;
using workload::Opcode;

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

double stencil_utilization(const config::Stencil& s, std::uint32_t ox, std::uint32_t oy, const config::DpuArray& a) {
  return static_cast<double>(std::min(s.tile_x, ox)) * std::min(s.tile_y, oy) /
         (static_cast<double>(a.rows) * a.cols);
}

config::Stencil select_stencil(std::uint32_t ox, std::uint32_t oy, const config::DpuArray& array,
                               const std::vector<config::Stencil>& set) {
  // Compare utilization numerators exactly; the denominator is shared.
  auto covered = [&](const config::Stencil& s) { return std::uint64_t{std::min(s.tile_x, ox)} * std::min(s.tile_y, oy); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    const auto a = covered(set[i]);
    const auto b = covered(set[best]);
    if (a > b || (a == b && set[i].tile_oc > set[best].tile_oc)) best = i;
  }
  (void)array;
  return set.at(best);
}

DataBlock dpu_block(const std::vector<workload::TensorDesc>& tensors, const workload::Operator& op,
                    const workload::Region& region, const config::Stencil& stencil) {
  const auto& out = tensors.at(op.outputs.front());
  const auto& in = tensors.at(op.inputs.front());
  const auto& e = region.extent;
  DataBlock b;
  b.region = region;
  if (region.empty()) return b;
  const std::uint64_t n = e[kN];
  const std::uint32_t in_y = workload::input_span(e[kH], op.ky, op.stride, in.dims[kH]);
  const std::uint32_t in_x = workload::input_span(e[kW], op.kx, op.stride, in.dims[kW]);
  const std::uint64_t in_c = op.opcode == Opcode::DepthwiseConv2D ? e[kC] : in.dims[kC];
  b.input_bytes = n * in_y * in_x * in_c * in.elem_bytes;
  if (op.fused_post == workload::FusedPost::EltwiseAdd && op.inputs.size() > 1) {
    b.input_bytes += n * e[kH] * e[kW] * e[kC] * tensors.at(op.inputs[1]).elem_bytes;
  }
  if (op.weights) {
    const auto& w = tensors.at(*op.weights);
    b.weight_bytes = ceil_div(w.bytes() * e[kC], out.dims[kC]);
  }
  b.out_elems = region.size();
  b.output_bytes = b.out_elems * out.elem_bytes;
  b.macs = workload::op_compute_count(tensors, op, region).macs;
  b.lanes_x = std::min(stencil.tile_x, e[kW]);
  b.lanes_y = std::min(stencil.tile_y, e[kH]);
  return b;
}

std::array<std::uint32_t, 3> dpu_block_extent(const std::vector<workload::TensorDesc>& tensors,
                                              const workload::Operator& op, const workload::Region& region,
                                              const config::Stencil& stencil, std::uint64_t block_buffer_bytes) {
  const auto& e = region.extent;
  const std::array<std::uint32_t, 3> limit{e[kW], e[kH], e[kC]};
  const std::array<std::uint32_t, 3> step{stencil.tile_x, stencil.tile_y, stencil.tile_oc};
  std::array<std::uint32_t, 3> ext{std::min(step[0], limit[0]), std::min(step[1], limit[1]), std::min(step[2], limit[2])};
  auto fits = [&](const std::array<std::uint32_t, 3>& x) {
    workload::Region r{region.offset, {e[kN], x[1], x[0], x[2]}};
    const auto b = dpu_block(tensors, op, r, stencil);
    return b.input_bytes + b.output_bytes <= block_buffer_bytes;
  };
  if (!fits(ext)) return ext;
  for (std::size_t d = 0; d < 3; ++d) {
    for (std::uint64_t m = 2; ext[d] < limit[d]; ++m) {
      auto cand = ext;
      cand[d] = static_cast<std::uint32_t>(std::min<std::uint64_t>(limit[d], m * step[d]));
      if (!fits(cand)) break;
      ext = cand;
    }
  }
  return ext;
}

std::vector<DataBlock> dpu_partition(const std::vector<workload::TensorDesc>& tensors, const workload::Operator& op,
                                     const workload::Region& region, const config::PlatformConfig& cfg) {
  std::vector<DataBlock> blocks;
  if (region.empty()) return blocks;
  const auto& o = region.offset;
  const auto& e = region.extent;
  const auto stencil = select_stencil(e[kW], e[kH], cfg.dpu_array, cfg.stencil_set);
  const auto ext = dpu_block_extent(tensors, op, region, stencil, cfg.dpu_array.block_buffer_bytes);
  for (std::uint32_t c = 0; c < e[kC]; c += ext[2]) {
    for (std::uint32_t y = 0; y < e[kH]; y += ext[1]) {
      for (std::uint32_t x = 0; x < e[kW]; x += ext[0]) {
        workload::Region r{{o[kN], o[kH] + y, o[kW] + x, o[kC] + c},
                           {e[kN], std::min(ext[1], e[kH] - y), std::min(ext[0], e[kW] - x), std::min(ext[2], e[kC] - c)}};
        blocks.push_back(dpu_block(tensors, op, r, stencil));
      }
    }
  }
  return blocks;
}

StageCycles dpu_stage_cycles(const DataBlock& block, const workload::Operator& op, const config::PlatformConfig& cfg) {
  const Clock dpu(cfg.freq_mhz.dpu, cfg.freq_mhz.reference);
  const Clock cb(cfg.freq_mhz.cb, cfg.freq_mhz.reference);
  StageCycles s{};
  s[kLoad] = cb.transfer(block.input_bytes + block.weight_bytes, cfg.cb.bw_bytes_per_cycle);
  const std::uint64_t lanes = std::uint64_t{block.lanes_x} * block.lanes_y * cfg.dpu_array.macs_per_cell;
  s[kCompute] = block.macs ? dpu.cycles(ceil_div(block.macs, lanes)) : 0;
  s[kPost] = op.fused_post != workload::FusedPost::None && block.out_elems
                 ? dpu.cycles(ceil_div(block.out_elems, cfg.dpu_array.effective_ppe()))
                 : 0;
  s[kStore] = cb.transfer(block.output_bytes, cfg.cb.bw_bytes_per_cycle);
  return s;
}

std::vector<DspBlock> dsp_partition(const std::vector<workload::TensorDesc>& tensors, const workload::Operator& op,
                                    const workload::Region& region, const config::PlatformConfig& cfg) {
  std::vector<DspBlock> blocks;
  const std::uint64_t total = region.size();
  if (total == 0) return blocks;
  const auto& out = tensors.at(op.outputs.front());
  const std::uint64_t out_volume = workload::volume(out.dims);
  const std::uint64_t per_block = std::uint64_t{cfg.dsp.pipeline_block} * cfg.dsp.simd_width;
  for (std::uint64_t done = 0; done < total; done += per_block) {
    DspBlock b;
    b.elems = std::min(per_block, total - done);
    for (auto i : op.inputs) {
      const auto& in = tensors.at(i);
      b.input_bytes += ceil_div(b.elems * workload::volume(in.dims) * in.elem_bytes, out_volume);
    }
    b.output_bytes = b.elems * out.elem_bytes;
    blocks.push_back(b);
  }
  return blocks;
}

StageCycles dsp_stage_cycles(const DspBlock& block, const DspKernelCurve& curve, const config::PlatformConfig& cfg) {
  const Clock dsp(cfg.freq_mhz.dsp, cfg.freq_mhz.reference);
  const Clock cb(cfg.freq_mhz.cb, cfg.freq_mhz.reference);
  StageCycles s{};
  s[kLoad] = cb.transfer(block.input_bytes, cfg.cb.bw_bytes_per_cycle);
  // A kernel cannot process faster than one SIMD vector per cycle.
  const auto kernel = std::max(dsp_kernel_cycles(curve, block.elems), ceil_div(block.elems, cfg.dsp.simd_width));
  s[kCompute] = dsp.cycles(kernel);
  s[kStore] = cb.transfer(block.output_bytes, cfg.cb.bw_bytes_per_cycle);
  return s;
}

std::uint64_t pipeline_cycles(const std::vector<StageCycles>& blocks) {
  if (blocks.empty()) return 0;
  std::uint64_t total = std::accumulate(blocks[0].begin(), blocks[0].end(), std::uint64_t{0});
  for (std::size_t k = 1; k < blocks.size(); ++k) total += *std::max_element(blocks[k].begin(), blocks[k].end());
  return total;
}

}  // namespace neusim::engines
