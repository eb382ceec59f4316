#include "neusim/simulator.hpp"

#include <map>
#include <memory>
#include <tuple>

#include "neusim/engines/engines.hpp"
#include "neusim/error.hpp"
#include "neusim/memory/cb.hpp"
#include "neusim/memory/ddr.hpp"
#include "neusim/memory/dma.hpp"
#include "neusim/memory/noc.hpp"

namespace neusim {

namespace {

using config::EngineClass;

class PlatformExecutor final : public sched::TaskExecutor {
 public:
  PlatformExecutor(const workload::TaskGraph& graph, memory::Dma& dma,
                   std::vector<std::unique_ptr<engines::DpuEngine>>& dpus,
                   std::vector<std::unique_ptr<engines::DspEngine>>& dsps, const config::PlatformConfig& cfg,
                   RunResult& result)
      : graph_(graph), dma_(dma), dpus_(dpus), dsps_(dsps), cfg_(cfg), result_(result) {}

  sim::Task execute(std::size_t index, sched::Meta& meta) override {
    const auto& task = graph_.tasks[index];
    if (task.is_compute()) {
      const auto& c = task.compute();
      engines::ComputeStats stats;
      if (c.engine == workload::EngineKind::Dpu) {
        co_await dpus_[c.tile * cfg_.dpus_per_tile + c.unit]->run(c, meta, stats);
      } else {
        co_await dsps_[c.tile * cfg_.dsps_per_tile + c.unit]->run(c, meta, stats);
      }
      result_.macs += stats.macs;
      result_.dsp_elems += stats.elems;
    } else {
      memory::DmaResult r;
      co_await dma_.execute(task.dma(), task.id, r);
      result_.dma_bytes += r.dst_bytes;
      meta.emplace_back("requests", std::to_string(r.requests));
      meta.emplace_back("bytes", std::to_string(r.dst_bytes));
      meta.emplace_back("achieved_bw", std::to_string(r.achieved_bw()));
    }
  }

 private:
  const workload::TaskGraph& graph_;
  memory::Dma& dma_;
  std::vector<std::unique_ptr<engines::DpuEngine>>& dpus_;
  std::vector<std::unique_ptr<engines::DspEngine>>& dsps_;
  const config::PlatformConfig& cfg_;
  RunResult& result_;
};

void check_targets(const workload::TaskGraph& graph, const config::PlatformConfig& p,
                   const engines::DspCurveTable& curves) {
  for (const auto& t : graph.tasks) {
    const auto here = "task '" + t.id + "'";
    if (t.is_compute()) {
      const auto& c = t.compute();
      const auto units = c.engine == workload::EngineKind::Dpu ? p.dpus_per_tile : p.dsps_per_tile;
      if (c.tile >= p.tiles) {
        throw WorkloadError(here + " targets tile " + std::to_string(c.tile) + " but the platform has " +
                            std::to_string(p.tiles));
      }
      if (c.unit >= units) {
        throw WorkloadError(here + " targets " + std::string(workload::to_string(c.engine)) + " unit " +
                            std::to_string(c.unit) + " but tiles have " + std::to_string(units));
      }
      if (c.engine == workload::EngineKind::Dsp) curves.at(graph.operators[c.op].kernel);
    } else {
      const auto& d = t.dma();
      if (d.channel >= p.dma.channels) {
        throw WorkloadError(here + " targets DMA channel " + std::to_string(d.channel) + " but the platform has " +
                            std::to_string(p.dma.channels));
      }
      for (const auto& desc : d.descriptors) {
        for (auto tile : memory::dma_destinations(desc, graph.tensors[desc.dst])) {
          if (tile >= p.tiles) throw WorkloadError(here + " writes to tile " + std::to_string(tile) + " which does not exist");
        }
        const auto& src = graph.tensors[desc.src].location;
        if (src.kind == workload::Location::Kind::Cb && src.tile >= p.tiles) {
          throw WorkloadError(here + " reads from tile " + std::to_string(src.tile) + " which does not exist");
        }
      }
    }
  }
}

}  // namespace

RunResult simulate(const config::SimConfig& cfg, const workload::TaskGraph& graph,
                   const engines::DspCurveTable* curves) {
  const auto& p = cfg.platform;
  const auto& f = p.freq_mhz;
  engines::DspCurveTable loaded;
  if (!curves) {
    if (!p.dsp_kernels.empty()) loaded = engines::load_dsp_curves(p.dsp_kernels);
    curves = &loaded;
  }
  check_targets(graph, p, *curves);

  RunResult result;
  result.reference_mhz = f.reference;
  auto& log = result.activity;
  sim::Environment env;
  std::uint64_t hash = 1469598103934665603ull;
  env.set_observer([&hash](sim::SimTime t, sim::ProcessId pid, sim::EventKind kind) {
    for (std::uint64_t v : {t, std::uint64_t{pid}, static_cast<std::uint64_t>(kind)}) {
      for (int i = 0; i < 8; ++i) {
        hash ^= (v >> (8 * i)) & 0xff;
        hash *= 1099511628211ull;
      }
    }
  });

  std::vector<memory::ComputeBuffer> cbs;
  for (std::uint32_t t = 0; t < p.tiles; ++t) {
    const auto model = log.add_model("tile" + std::to_string(t) + "/cb", EngineClass::Cb,
                                     p.cb.ports * p.cb.bw_bytes_per_cycle, f.cb);
    cbs.emplace_back(p.cb, Clock(f.cb, f.reference), &log, model);
  }
  const auto ddr_model = log.add_model("ddr", EngineClass::Ddr, p.ddr.bw_bytes_per_cycle, f.ddr);
  memory::Ddr ddr(p.ddr, Clock(f.ddr, f.reference), &log, ddr_model);
  std::vector<std::string> masters{"ddr"};
  for (std::uint32_t t = 0; t < p.tiles; ++t) masters.push_back("cb" + std::to_string(t));
  memory::Noc noc(env, p.noc, Clock(f.noc, f.reference), masters, p.dma.channels, &log);
  memory::Dma dma(env, p, graph, noc, ddr, cbs, &log);

  std::vector<std::string> names;
  std::vector<EngineClass> classes;
  std::vector<std::unique_ptr<engines::DpuEngine>> dpus;
  std::vector<std::unique_ptr<engines::DspEngine>> dsps;
  for (std::uint32_t t = 0; t < p.tiles; ++t) {
    const auto tile = "tile" + std::to_string(t) + "/";
    for (std::uint32_t u = 0; u < p.dpus_per_tile; ++u) {
      const auto name = tile + "dpu" + std::to_string(u);
      const auto model = log.add_model(
          name, EngineClass::Dpu, static_cast<double>(p.dpu_array.rows) * p.dpu_array.cols * p.dpu_array.macs_per_cell, f.dpu);
      dpus.push_back(std::make_unique<engines::DpuEngine>(env, p, graph, cbs[t], u, &log, model));
    }
    for (std::uint32_t u = 0; u < p.dsps_per_tile; ++u) {
      const auto name = tile + "dsp" + std::to_string(u);
      const auto model = log.add_model(name, EngineClass::Dsp, p.dsp.simd_width, f.dsp);
      dsps.push_back(
          std::make_unique<engines::DspEngine>(env, p, graph, cbs[t], p.dpus_per_tile + u, *curves, &log, model));
    }
  }
  // Engine order: per tile DPUs then DSPs, then DMA channels.
  std::map<std::tuple<std::uint32_t, int, std::uint32_t>, std::size_t> index;
  for (std::uint32_t t = 0; t < p.tiles; ++t) {
    for (std::uint32_t u = 0; u < p.dpus_per_tile; ++u) {
      index[{t, 0, u}] = names.size();
      names.push_back("tile" + std::to_string(t) + "/dpu" + std::to_string(u));
      classes.push_back(EngineClass::Dpu);
    }
    for (std::uint32_t u = 0; u < p.dsps_per_tile; ++u) {
      index[{t, 1, u}] = names.size();
      names.push_back("tile" + std::to_string(t) + "/dsp" + std::to_string(u));
      classes.push_back(EngineClass::Dsp);
    }
  }
  for (std::uint32_t c = 0; c < p.dma.channels; ++c) {
    index[{0, 2, c}] = names.size();
    names.push_back("dma" + std::to_string(c));
    classes.push_back(EngineClass::Dma);
  }
  std::vector<std::size_t> engine_of;
  for (const auto& t : graph.tasks) {
    if (t.is_compute()) {
      const auto& c = t.compute();
      engine_of.push_back(index.at({c.tile, c.engine == workload::EngineKind::Dpu ? 0 : 1, c.unit}));
    } else {
      engine_of.push_back(index.at({0, 2, t.dma().channel}));
    }
  }

  PlatformExecutor executor(graph, dma, dpus, dsps, p, result);
  sched::Scheduler scheduler(env, graph, names, engine_of, executor, p.scheduler.fifo_depth, p.scheduler.barrier_slots,
                             &result.trace);
  scheduler.start();
  env.run_until(cfg.sim.run_limit);
  if (!scheduler.complete() && !env.idle()) {
    throw SimulationError("run limit of " + std::to_string(*cfg.sim.run_limit) + " cycles reached with " +
                          std::to_string(graph.tasks.size() - scheduler.completed()) + " task(s) incomplete");
  }
  scheduler.check_complete();

  result.cycles = scheduler.last_completion();
  result.timings = scheduler.timings();
  for (std::size_t b = 0; b < graph.barriers.size(); ++b) result.barrier_fire.push_back(scheduler.scoreboard().fire_time(b));
  for (std::size_t e = 0; e < names.size(); ++e) result.engines.push_back({names[e], classes[e], 0});
  for (std::size_t i = 0; i < graph.tasks.size(); ++i) {
    const auto& tm = result.timings[i];
    result.engines[engine_of[i]].busy += *tm.end - *tm.start;
  }
  result.fired_events = env.fired_events();
  result.event_hash = hash;
  result.ddr_bytes = ddr.bytes_moved();
  return result;
}

}  // namespace neusim
