#include "neusim/engines/engines.hpp"

#include <algorithm>

namespace neusim::engines {

namespace {

std::string stencil_name(const config::Stencil& s) {
  return std::to_string(s.tile_x) + "x" + std::to_string(s.tile_y) + "x" + std::to_string(s.tile_oc);
}

}  // namespace

DpuEngine::DpuEngine(sim::Environment& env, const config::PlatformConfig& cfg, const workload::TaskGraph& graph,
                     memory::ComputeBuffer& cb, std::uint32_t index, ActivityLog* log, std::size_t model)
    : env_(&env), cfg_(&cfg), graph_(&graph), cb_(&cb), log_(log), model_(model) {
  std::tie(read_port_, write_port_) = memory::ComputeBuffer::engine_ports(index, cb.ports());
}

sim::Task DpuEngine::run(const workload::ComputeTask& task, Meta& meta, ComputeStats& stats) {
  const auto& op = graph_->operators[task.op];
  const auto blocks = dpu_partition(graph_->tensors, op, task.region, *cfg_);
  stats = {};
  if (blocks.empty()) co_return;
  const auto& e = task.region.extent;
  meta.emplace_back("stencil", stencil_name(select_stencil(e[workload::kW], e[workload::kH], cfg_->dpu_array,
                                                           cfg_->stencil_set)));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    const auto st = dpu_stage_cycles(b, op, *cfg_);
    const auto t0 = env_->now();
    if (k == 0) {
      // First block: stages back to back.
      const auto load = cb_->access(read_port_, t0, b.input_bytes + b.weight_bytes).end - t0;
      if (log_ && b.macs) log_->record(model_, t0 + load, t0 + load + st[kCompute], b.macs);
      co_await env_->until(t0 + load + st[kCompute] + st[kPost]);
      co_await env_->until(cb_->access(write_port_, env_->now(), b.output_bytes).end);
    } else {
      // Steady state: every stage works on some block; the slowest sets the pace.
      const auto load = cb_->access(read_port_, t0, b.input_bytes + b.weight_bytes).end - t0;
      const auto store = cb_->access(write_port_, t0, b.output_bytes).end - t0;
      if (log_ && b.macs) log_->record(model_, t0, t0 + st[kCompute], b.macs);
      co_await env_->until(t0 + std::max({load, st[kCompute], st[kPost], store}));
    }
    stats.macs += b.macs;
  }
  stats.blocks = blocks.size();
  meta.emplace_back("blocks", std::to_string(stats.blocks));
  meta.emplace_back("macs", std::to_string(stats.macs));
}

DspEngine::DspEngine(sim::Environment& env, const config::PlatformConfig& cfg, const workload::TaskGraph& graph,
                     memory::ComputeBuffer& cb, std::uint32_t index, const DspCurveTable& curves, ActivityLog* log,
                     std::size_t model)
    : env_(&env), cfg_(&cfg), graph_(&graph), cb_(&cb), curves_(&curves), log_(log), model_(model) {
  std::tie(read_port_, write_port_) = memory::ComputeBuffer::engine_ports(index, cb.ports());
}

sim::Task DspEngine::run(const workload::ComputeTask& task, Meta& meta, ComputeStats& stats) {
  const auto& op = graph_->operators[task.op];
  const auto& curve = curves_->at(op.kernel);
  const auto blocks = dsp_partition(graph_->tensors, op, task.region, *cfg_);
  stats = {};
  if (blocks.empty()) co_return;
  meta.emplace_back("kernel", op.kernel);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    const auto st = dsp_stage_cycles(b, curve, *cfg_);
    const auto t0 = env_->now();
    if (k == 0) {
      const auto load = cb_->access(read_port_, t0, b.input_bytes).end - t0;
      if (log_) log_->record(model_, t0 + load, t0 + load + st[kCompute], b.elems);
      co_await env_->until(t0 + load + st[kCompute]);
      co_await env_->until(cb_->access(write_port_, env_->now(), b.output_bytes).end);
    } else {
      const auto load = cb_->access(read_port_, t0, b.input_bytes).end - t0;
      const auto store = cb_->access(write_port_, t0, b.output_bytes).end - t0;
      if (log_) log_->record(model_, t0, t0 + st[kCompute], b.elems);
      co_await env_->until(t0 + std::max({load, st[kCompute], store}));
    }
    stats.elems += b.elems;
  }
  stats.blocks = blocks.size();
  meta.emplace_back("blocks", std::to_string(stats.blocks));
  meta.emplace_back("elems", std::to_string(stats.elems));
}

}  // namespace neusim::engines
