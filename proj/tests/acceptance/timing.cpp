#include <algorithm>
#include <chrono>
#include <sstream>

#include "acceptance/criteria.hpp"
#include "neusim/report.hpp"
#include "neusim/simulator.hpp"
#include "neusim/workload/compiler.hpp"
#include "neusim/workload/models.hpp"
#include "support.hpp"

namespace neusim::acceptance {

namespace {

using workload::Opcode;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Artifacts {
  std::string timeline;
  std::string summary;
  std::string power;
  std::uint64_t hash = 0;
};

Artifacts run_artifacts(const config::SimConfig& cfg, const workload::TaskGraph& g) {
  const auto run = simulate(cfg, g);
  const auto power = report::evaluate_power(cfg, run);
  std::ostringstream t, s, p;
  report::write_timeline(t, run.trace, run.reference_mhz);
  report::write_summary_csv(s, report::summarize(cfg, run, power ? &*power : nullptr));
  if (power) report::write_power_csv(p, *power);
  return {t.str(), s.str(), p.str(), run.event_hash};
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = test::platform({"sim.power_enabled=true"}, true);
  const auto graph = workload::compile_reference(workload::conv_stack(10), cfg.platform);
  const auto a = run_artifacts(cfg, graph);
  const auto b = run_artifacts(cfg, graph);
  const double s = seconds_since(t0);
  Verdict v;
  v << "timeline " << a.timeline.size() << " B, summary " << a.summary.size() << " B, power " << a.power.size()
    << " B, two runs in " << s << " s";
  v.require(a.timeline == b.timeline, "timeline differs");
  v.require(a.summary == b.summary, "summary CSV differs");
  v.require(a.power == b.power && !a.power.empty(), "power CSV differs or is empty");
  v.require(a.hash == b.hash, "event log hash differs");
  v.require(s < 5.0, "slower than 5 s");
  return v.outcome();
}

// Conv (1x1, 64->64 channels on 8x8) followed by ReLU on one tile, with
// every task serialized through a barrier. Each step is costed by hand from
// the platform parameters; all clocks equal the reference clock.
Outcome exact_oracle() {
  const auto cfg = test::platform({"tiles=1", "ddr.page_bytes=4096", "ddr.refresh_interval=0",
                                   "dpu_array.block_buffer_bytes=5500", "dma.max_request_bytes=4096"});
  const auto& p = cfg.platform;
  test::GraphBuilder b;
  const workload::Dims act{1, 8, 8, 64};
  const auto w_ddr = b.ddr("w", {64, 1, 1, 64}, 0);
  const auto in_ddr = b.ddr("x", act, 4096);
  const auto out_ddr = b.ddr("y", act, 8192);
  const auto w_cb = b.cb("w@cb", {64, 1, 1, 64}, 0, 0);
  const auto in_cb = b.cb("x@cb", act, 0, 4096);
  const auto conv_cb = b.cb("conv@cb", act, 0, 8192);
  const auto relu_cb = b.cb("relu@cb", act, 0, 12288);
  workload::Operator conv;
  conv.id = "conv";
  conv.opcode = Opcode::Conv2D;
  conv.inputs = {in_cb};
  conv.weights = w_cb;
  conv.outputs = {conv_cb};
  workload::Operator relu;
  relu.id = "relu";
  relu.opcode = Opcode::Activation;
  relu.kernel = "relu";
  relu.inputs = {conv_cb};
  relu.outputs = {relu_cb};
  const auto conv_op = b.op(conv);
  const auto relu_op = b.op(relu);
  const auto b0 = b.barrier(), b1 = b.barrier(), b2 = b.barrier(), b3 = b.barrier();
  b.copy("w", 0, w_ddr, w_cb, {}, {b0});
  b.copy("x", 1, in_ddr, in_cb, {b0}, {b1});
  b.compute("conv", conv_op, 0, 0, {b1}, {b2});
  b.compute("relu", relu_op, 0, 0, {b2}, {b3});
  b.copy("y", 2, relu_cb, out_ddr, {b3}, {});
  const auto run = simulate(cfg, b.g);

  // 4 KiB DMA: DDR opens one fresh page (tRCD + tCL) and streams 64 bursts,
  // the NOC port serializes and adds its latency, the CB port writes and adds
  // its latency. The channel issue slot is shorter and hidden.
  const std::uint64_t bytes = 4096;
  const auto burst = ceil_div(p.ddr.burst_bytes, static_cast<std::uint64_t>(p.ddr.bw_bytes_per_cycle));
  const auto ddr_side = p.ddr.tRCD + p.ddr.tCL + (bytes / p.ddr.burst_bytes) * burst;
  const auto noc_side = ceil_div(bytes, static_cast<std::uint64_t>(p.noc.port_bw_bytes_per_cycle)) + p.noc.port_latency;
  const auto cb_side = ceil_div(bytes, static_cast<std::uint64_t>(p.cb.bw_bytes_per_cycle)) + p.cb.latency;
  const auto slot = ceil_div(bytes, static_cast<std::uint64_t>(p.dma.bw_bytes_per_cycle));
  const auto dma = std::max(slot, ddr_side + noc_side + cb_side);

  // Conv: the 8x8 output clips the 16x16x16 stencil to 8x8x16; the 5500-byte
  // block buffer holds 4096 input + 1024 output bytes, so four oc blocks.
  const std::uint64_t cbw = static_cast<std::uint64_t>(p.cb.bw_bytes_per_cycle);
  const auto conv_load = ceil_div(4096 + 4096 / 4, cbw);
  const std::uint64_t conv_mac = (8ull * 8 * 16 * 64) / (8ull * 8 * p.dpu_array.macs_per_cell);
  const auto conv_store = ceil_div(8 * 8 * 16, cbw);
  const auto conv_fill = conv_load + conv_mac + conv_store;
  const auto conv_total = conv_fill + 3 * std::max({conv_load, conv_mac, conv_store});

  // ReLU: 4096 elems in blocks of 8 vectors x 32 lanes; relu curve
  // offset 24 + 16 per 128-elem block.
  const std::uint64_t blk = std::uint64_t{p.dsp.pipeline_block} * p.dsp.simd_width;
  const auto relu_load = ceil_div(blk, cbw);
  const std::uint64_t relu_compute = 24 + 16 * (blk / 128);
  const auto relu_total = relu_load + relu_compute + relu_load + (4096 / blk - 1) * relu_compute;

  const auto expected = dma + dma + conv_total + relu_total + dma;
  Verdict v;
  v << "simulated " << run.cycles << " cycles, closed form " << expected << " (dma " << dma << ", conv "
    << conv_total << ", relu " << relu_total << ")";
  v.require(run.cycles == expected, "mismatch");
  v.require(expected == 2192, "hand-evaluated constant 2192 disagrees");
  return v.outcome();
}

Outcome compute_bound() {
  const auto cfg = test::platform();
  const auto& p = cfg.platform;
  const auto graph = workload::compile_reference(workload::conv_stack(10), p);
  const auto run = simulate(cfg, graph);
  sim::SimTime busy = 0;
  for (const auto& e : run.engines) {
    if (e.engine_class == config::EngineClass::Dpu) busy += e.busy;
  }
  const double bound = static_cast<double>(run.macs) / (double(p.dpu_array.rows) * p.dpu_array.cols * 16);
  const double util = static_cast<double>(run.macs) /
                      (double(p.dpu_array.rows) * p.dpu_array.cols * p.dpu_array.macs_per_cell * p.tiles *
                       p.dpus_per_tile * static_cast<double>(run.cycles));
  Verdict v;
  v << "DPU busy " << busy << " >= " << bound << " cycles, MAC utilization " << util;
  v.require(static_cast<double>(busy) >= bound, "busy below the MAC bound");
  v.require(util > 0.0 && util <= 1.0, "utilization outside (0, 1]");
  return v.outcome();
}

}  // namespace neusim::acceptance
