#pragma once

// Hierarchical platform / simulation / power configuration.
//
// Configuration is YAML. Several files deep-merge in order (maps merge
// key-by-key, scalars and sequences are replaced). Cycle-valued parameters are
// expressed in the clock domain of the engine that owns them; bandwidths are
// bytes per owning-engine cycle. See data/schema.md for every key and unit.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neusim/power/types.hpp"

namespace YAML {
class Node;
}

namespace neusim::config {

enum class EngineClass { Reference, Dpu, Dsp, Dma, Noc, Cb, Ddr };

std::string_view to_string(EngineClass c);
std::optional<EngineClass> engine_class_from_string(std::string_view s);

enum class PagePolicy { Open, Closed };

struct Stencil {
  std::uint32_t tile_x = 1;
  std::uint32_t tile_y = 1;
  std::uint32_t tile_oc = 1;

  bool operator==(const Stencil&) const = default;
};

struct DpuArray {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t macs_per_cell = 16;
  std::uint32_t ppe_throughput = 0;  // post-processing elems/cycle; 0 means `cols`
  std::uint64_t block_buffer_bytes = 0;

  std::uint32_t effective_ppe() const { return ppe_throughput ? ppe_throughput : cols; }
  bool operator==(const DpuArray&) const = default;
};

struct DspParams {
  std::uint32_t simd_width = 0;      // elements per SIMD vector
  std::uint32_t unroll_block = 0;    // elements per unrolled loop block
  std::uint32_t pipeline_block = 0;  // SIMD vectors per pipeline data block

  bool operator==(const DspParams&) const = default;
};

struct CbParams {
  std::uint64_t size_bytes = 0;
  std::uint32_t ports = 0;
  double bw_bytes_per_cycle = 0.0;  // per port
  std::uint64_t latency = 0;

  bool operator==(const CbParams&) const = default;
};

struct DdrParams {
  double bw_bytes_per_cycle = 0.0;
  std::uint32_t banks = 0;
  std::uint64_t page_bytes = 0;
  std::uint64_t tCL = 0;
  std::uint64_t tRCD = 0;
  std::uint64_t tRP = 0;
  std::uint64_t burst_bytes = 0;
  std::uint64_t refresh_interval = 0;  // 0 disables refresh
  std::uint64_t refresh_penalty = 0;
  PagePolicy page_policy = PagePolicy::Open;

  bool operator==(const DdrParams&) const = default;
};

struct DmaParams {
  std::uint32_t channels = 0;
  std::uint64_t max_request_bytes = 4096;
  std::uint32_t outstanding = 8;
  double bw_bytes_per_cycle = 0.0;  // per channel issue rate

  bool operator==(const DmaParams&) const = default;
};

struct NocParams {
  std::uint64_t port_latency = 0;
  double port_bw_bytes_per_cycle = 0.0;

  bool operator==(const NocParams&) const = default;
};

struct SchedulerParams {
  std::uint32_t fifo_depth = 0;
  std::uint32_t barrier_slots = 64;

  bool operator==(const SchedulerParams&) const = default;
};

struct Frequencies {
  double reference = 0.0;
  double dpu = 0.0;
  double dsp = 0.0;
  double dma = 0.0;
  double noc = 0.0;
  double cb = 0.0;
  double ddr = 0.0;

  double of(EngineClass c) const;
  bool operator==(const Frequencies&) const = default;
};

struct PlatformConfig {
  std::uint32_t tiles = 0;
  std::uint32_t dpus_per_tile = 0;
  DpuArray dpu_array;
  std::vector<Stencil> stencil_set;
  std::uint32_t dsps_per_tile = 0;
  DspParams dsp;
  CbParams cb;
  DdrParams ddr;
  DmaParams dma;
  NocParams noc;
  SchedulerParams scheduler;
  Frequencies freq_mhz;
  std::string dsp_kernels;  // characterization table path, may be empty

  bool operator==(const PlatformConfig&) const = default;
};

struct SimOptions {
  std::string trace_path;
  std::string report_path;
  std::string power_path;
  std::optional<std::uint64_t> run_limit;
  bool power_enabled = false;
  std::uint64_t pti_cycles = 0;

  bool operator==(const SimOptions&) const = default;
};

struct SimConfig {
  PlatformConfig platform;
  SimOptions sim;
  std::optional<power::PowerConfig> power;

  bool operator==(const SimConfig&) const = default;
};

/// Loads, deep-merges and validates the given files (later files win).
SimConfig load_config(std::span<const std::filesystem::path> paths);

/// Deep merge: maps merge recursively, anything else in `overlay` replaces.
YAML::Node deep_merge(const YAML::Node& base, const YAML::Node& overlay);

/// Typed parse of a merged document, followed by `validate`.
SimConfig parse_config(const YAML::Node& doc);

/// Throws ConfigError naming the offending key path.
void validate(const SimConfig& cfg);

/// Full document with every key spelled out (defaults included).
YAML::Node to_yaml(const SimConfig& cfg);
std::string serialize(const SimConfig& cfg);

/// Applies "dotted.key=value" strings. Each key must name an existing entry of
/// the fully spelled-out document; the result is re-parsed and re-validated.
SimConfig apply_overrides(const SimConfig& cfg, std::span<const std::string> overrides);

}  // namespace neusim::config
