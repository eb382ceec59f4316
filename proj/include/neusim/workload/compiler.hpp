#pragma once

// Reference tiler: turns an operator list into an executable task graph.
//
// Every operator is split into equal output-H slabs, one per tile. Per
// operator and in this order the graph lists a weight broadcast DMA, one
// input DMA per tile, one compute task per tile and one output DMA per tile.
// Activations live in DDR between operators.

#include <filesystem>

#include "neusim/config.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::workload {

/// Throws WorkloadError on cyclic operator lists and on slabs that do not
/// fit the compute buffer ("unschedulable").
TaskGraph compile_reference(const OpList& ops, const config::PlatformConfig& cfg);

/// Loads a task graph, or compiles an operator list for `cfg`, depending on
/// the file's "format" key.
TaskGraph load_workload(const std::filesystem::path& path, const config::PlatformConfig& cfg);

/// Operator indices in dependency order; ties keep list order.
std::vector<std::size_t> topological_order(const OpList& ops);

}  // namespace neusim::workload
