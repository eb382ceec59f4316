#pragma once

// Shared fixtures: the reference platform files and a hand-assembly helper
// for small task graphs.

#include <filesystem>
#include <string>
#include <vector>

#include "neusim/config.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::test {

inline std::filesystem::path data_dir() { return NEUSIM_DATA_DIR; }

inline config::SimConfig platform(std::vector<std::string> overrides = {}, bool with_power = false) {
  std::vector<std::filesystem::path> files{data_dir() / "platform.yaml"};
  if (with_power) files.push_back(data_dir() / "power.yaml");
  auto cfg = config::load_config(files);
  return overrides.empty() ? cfg : config::apply_overrides(cfg, overrides);
}

/// Builds task graphs by hand. Every DMA copies a whole tensor as one
/// contiguous run; every compute task covers its operator's full output.
class GraphBuilder {
 public:
  std::size_t ddr(std::string id, workload::Dims dims, std::uint64_t addr) {
    workload::TensorDesc t;
    t.id = std::move(id);
    t.dims = dims;
    t.base_addr = addr;
    g.tensors.push_back(t);
    return g.tensors.size() - 1;
  }

  std::size_t cb(std::string id, workload::Dims dims, std::uint32_t tile, std::uint64_t addr) {
    workload::TensorDesc t;
    t.id = std::move(id);
    t.dims = dims;
    t.location = {workload::Location::Kind::Cb, tile};
    t.base_addr = addr;
    g.tensors.push_back(t);
    return g.tensors.size() - 1;
  }

  std::size_t op(workload::Operator o) {
    g.operators.push_back(std::move(o));
    return g.operators.size() - 1;
  }

  std::size_t barrier(std::uint32_t producers = 1, std::uint32_t consumers = 1) {
    g.barriers.push_back({static_cast<std::uint32_t>(g.barriers.size()), producers, consumers});
    return g.barriers.size() - 1;
  }

  void copy(std::string id, std::uint32_t channel, std::size_t src, std::size_t dst, std::vector<std::size_t> wait,
            std::vector<std::size_t> update) {
    workload::DmaDescriptor d;
    d.src = src;
    d.dst = dst;
    d.dims = {g.tensors[src].bytes()};
    g.tasks.push_back({std::move(id), workload::DmaTask{channel, {d}}, std::move(wait), std::move(update)});
  }

  void compute(std::string id, std::size_t op, std::uint32_t tile, std::uint32_t unit, std::vector<std::size_t> wait,
               std::vector<std::size_t> update) {
    const auto& o = g.operators[op];
    workload::ComputeTask c;
    c.engine = o.affinity();
    c.tile = tile;
    c.unit = unit;
    c.op = op;
    c.region.extent = g.tensors[o.outputs.front()].dims;
    g.tasks.push_back({std::move(id), c, std::move(wait), std::move(update)});
  }

  workload::TaskGraph g;
};

}  // namespace neusim::test
