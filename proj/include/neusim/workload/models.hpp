#pragma once

// Synthetic operator lists used by the examples, the acceptance suite and the
// `neusim-cli generate` command. Activations and weights are int8 in DDR.

#include <cstdint>
#include <string>

#include "neusim/workload/task_graph.hpp"

namespace neusim::workload {

/// Small helper for assembling operator lists by hand.
class OpListBuilder {
 public:
  std::size_t tensor(std::string id, Dims dims, std::uint32_t elem_bytes = 1);
  std::size_t conv(std::string id, std::size_t input, std::uint32_t out_c, std::uint32_t k, std::uint32_t stride,
                   FusedPost post = FusedPost::Activation, std::optional<std::size_t> residual = std::nullopt);
  std::size_t depthwise(std::string id, std::size_t input, std::uint32_t k, std::uint32_t stride);
  std::size_t matmul(std::string id, std::size_t input, std::uint32_t out_c);
  /// DSP operator with the output shape of `inputs[0]` (Pool with `k` > 1
  /// shrinks H and W by `k`).
  std::size_t dsp(std::string id, Opcode opcode, std::vector<std::size_t> inputs, std::string kernel,
                  std::uint32_t k = 1);

  const TensorDesc& at(std::size_t t) const { return ops_.tensors.at(t); }
  OpList take() { return std::move(ops_); }

 private:
  OpList ops_;
};

/// `layers` same-padding 3x3 convolutions of `channels` channels on an
/// `hw`x`hw` map; compute-bound at the default platform sizes.
OpList conv_stack(std::uint32_t layers, std::uint32_t hw = 32, std::uint32_t channels = 256);

/// ResNet-50 topology at 224x224: 53 convolutions (stem, 16 bottlenecks,
/// 4 projections) with fused residual adds, max/average pooling and the
/// classifier.
OpList resnet50_like();

/// Elementwise DSP chain over a large tensor: dominated by DDR traffic.
OpList memory_bound(std::uint32_t layers = 4, std::uint32_t hw = 112, std::uint32_t channels = 64);

}  // namespace neusim::workload
