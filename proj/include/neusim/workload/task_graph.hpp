#pragma once

// Task-graph interchange format ("neusim-taskgraph/1").
//
// A task graph lists tensors, operators, compute/DMA tasks in topological
// order, and barriers. Tensor extents are NHWC. See data/schema.md for the
// JSON layout.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

namespace neusim::workload {

inline constexpr std::string_view kTaskGraphFormat = "neusim-taskgraph/1";
inline constexpr std::string_view kOpListFormat = "neusim-oplist/1";

using Dims = std::array<std::uint32_t, 4>;  // N, H, W, C
enum Axis : std::size_t { kN = 0, kH = 1, kW = 2, kC = 3 };

std::uint64_t volume(const Dims& d);

/// Size of `bytes` after compression at `ratio`: floor, but never below one
/// byte for a nonempty payload. Floor keeps sums of chunk sizes within the
/// compressed size of the whole.
std::uint64_t compressed_bytes(std::uint64_t bytes, double ratio);

struct Location {
  enum class Kind { Ddr, Cb };
  Kind kind = Kind::Ddr;
  std::uint32_t tile = 0;

  bool operator==(const Location&) const = default;
};

struct TensorDesc {
  std::string id;
  Dims dims{1, 1, 1, 1};
  std::uint32_t elem_bytes = 1;
  Location location;
  std::uint64_t base_addr = 0;
  double sparsity_density = 1.0;
  bool compressed = false;
  double compression_ratio = 1.0;

  std::uint64_t bytes() const { return volume(dims) * elem_bytes; }
  /// Bytes occupied in memory (compressed_bytes() when stored compressed).
  std::uint64_t storage_bytes() const;
  /// Byte strides of a dense NHWC layout.
  std::array<std::uint64_t, 4> strides() const;
};

enum class Opcode { Conv2D, DepthwiseConv2D, MatMul, Eltwise, Activation, Pool, Softmax };
enum class EngineKind { Dpu, Dsp };
enum class FusedPost { None, Activation, EltwiseAdd, BatchNorm };

std::string_view to_string(Opcode op);
std::string_view to_string(EngineKind e);
std::string_view to_string(FusedPost f);
std::optional<Opcode> opcode_from_string(std::string_view s);

/// Engine class an opcode must run on: MAC-array ops on the DPU, everything
/// else on the DSP.
EngineKind affinity_of(Opcode op);

struct Operator {
  std::string id;
  Opcode opcode = Opcode::Conv2D;
  std::uint32_t kx = 1;
  std::uint32_t ky = 1;
  std::uint32_t stride = 1;
  std::uint32_t pad = 0;
  FusedPost fused_post = FusedPost::None;
  std::string kernel;  // DSP characterization kernel name
  std::vector<std::size_t> inputs;
  std::optional<std::size_t> weights;
  std::vector<std::size_t> outputs;

  EngineKind affinity() const { return affinity_of(opcode); }
};

/// Half-open box [offset, offset+extent) in NHWC output space.
struct Region {
  Dims offset{0, 0, 0, 0};
  Dims extent{0, 0, 0, 0};

  std::uint64_t size() const { return volume(extent); }
  bool empty() const { return size() == 0; }
  bool operator==(const Region&) const = default;
};

struct ComputeTask {
  EngineKind engine = EngineKind::Dpu;
  std::uint32_t tile = 0;
  std::uint32_t unit = 0;
  std::size_t op = 0;
  Region region;
};

enum class InlineOp { None, Decompress, Compress, Transpose };

/// Strided copy. `dims` lists extents outermost first; the innermost extent
/// is a contiguous byte run. Strides cover the outer dims only.
struct DmaDescriptor {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::uint64_t src_offset = 0;
  std::uint64_t dst_offset = 0;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint64_t> src_strides;
  std::vector<std::uint64_t> dst_strides;
  std::vector<std::uint32_t> broadcast;  // destination tiles; empty = dst tensor's tile
  InlineOp inline_op = InlineOp::None;
  double ratio = 1.0;

  /// Bytes described by `dims` (the uncompressed side).
  std::uint64_t pattern_bytes() const;
};

struct DmaTask {
  std::uint32_t channel = 0;
  std::vector<DmaDescriptor> descriptors;
};

struct Task {
  std::string id;
  std::variant<ComputeTask, DmaTask> body;
  std::vector<std::size_t> wait;    // barrier indices
  std::vector<std::size_t> update;  // barrier indices

  bool is_compute() const { return std::holds_alternative<ComputeTask>(body); }
  const ComputeTask& compute() const { return std::get<ComputeTask>(body); }
  const DmaTask& dma() const { return std::get<DmaTask>(body); }
};

struct BarrierDef {
  std::uint32_t id = 0;
  std::uint32_t producer_count = 1;
  std::uint32_t consumer_count = 1;
};

struct TaskGraph {
  std::vector<TensorDesc> tensors;
  std::vector<Operator> operators;
  std::vector<Task> tasks;
  std::vector<BarrierDef> barriers;

  std::optional<std::size_t> find_tensor(std::string_view id) const;
  std::optional<std::size_t> find_operator(std::string_view id) const;
};

/// Operators plus tensors, before tiling (input of the reference compiler).
struct OpList {
  std::vector<TensorDesc> tensors;
  std::vector<Operator> operators;
};

struct OpCount {
  std::uint64_t macs = 0;
  std::uint64_t elems = 0;
};

/// Ideal work in `region` of `op`'s output: MACs for DPU ops, processed
/// elements for DSP ops.
OpCount op_compute_count(const std::vector<TensorDesc>& tensors, const Operator& op, const Region& region);

/// Input extent along one spatial axis needed to produce `out_extent`
/// outputs, clipped to the input size.
std::uint32_t input_span(std::uint32_t out_extent, std::uint32_t kernel, std::uint32_t stride, std::uint32_t in_dim);

/// First input row feeding output row `out_row` (clamped at zero).
std::uint32_t input_row_begin(std::uint32_t out_row, std::uint32_t stride, std::uint32_t pad);

/// Full checks: references, barrier counts, acyclicity, region partition,
/// DMA descriptor bounds. Throws WorkloadError with the first violation.
void validate(const TaskGraph& graph);

/// Throws IoError when unreadable and WorkloadError on malformed JSON.
nlohmann::ordered_json read_json_file(const std::filesystem::path& path);

TaskGraph parse_task_graph(const nlohmann::ordered_json& doc);
TaskGraph load_task_graph(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const TaskGraph& graph);

OpList parse_op_list(const nlohmann::ordered_json& doc);
OpList load_op_list(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const OpList& ops);

}  // namespace neusim::workload
