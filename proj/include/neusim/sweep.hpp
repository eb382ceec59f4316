#pragma once

// Parameter sweeps: the Cartesian product of override axes and workloads,
// each point an independent simulation.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "neusim/report.hpp"

namespace neusim::report {

/// One sweep dimension. Several keys may move together: `values[i]` holds one
/// value per key.
struct SweepAxis {
  std::vector<std::string> keys;
  std::vector<std::vector<std::string>> values;
};

struct SweepSpec {
  std::vector<std::filesystem::path> configs;  // merge order
  std::vector<std::string> overrides;          // applied to every point
  std::vector<SweepAxis> axes;
  std::vector<std::filesystem::path> workloads;
  std::filesystem::path outputs;  // per-point artifacts when non-empty
  unsigned jobs = 1;
};

struct SweepRow {
  std::size_t point = 0;
  std::string workload;
  std::vector<std::string> values;  // one per axis key, in axis order
  bool ok = false;
  std::string error;  // "E_CODE: message" when the point failed
  Summary summary;
};

/// YAML sweep file: configs, overrides, axes ({key, values} or {keys,
/// values}), workloads, outputs, jobs. Relative paths resolve against the
/// file's directory.
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Rows come back in point order regardless of `jobs`. A failing point is
/// marked and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace neusim::report
