#include "neusim/workload/models.hpp"

namespace neusim::workload {

std::size_t OpListBuilder::tensor(std::string id, Dims dims, std::uint32_t elem_bytes) {
  TensorDesc t;
  t.id = std::move(id);
  t.dims = dims;
  t.elem_bytes = elem_bytes;
  ops_.tensors.push_back(std::move(t));
  return ops_.tensors.size() - 1;
}

std::size_t OpListBuilder::conv(std::string id, std::size_t input, std::uint32_t out_c, std::uint32_t k,
                                std::uint32_t stride, FusedPost post, std::optional<std::size_t> residual) {
  const auto in = at(input).dims;
  const std::uint32_t pad = k / 2;
  const std::uint32_t oh = (in[kH] + 2 * pad - k) / stride + 1;
  const std::uint32_t ow = (in[kW] + 2 * pad - k) / stride + 1;
  Operator op;
  op.id = id;
  op.opcode = Opcode::Conv2D;
  op.kx = op.ky = k;
  op.stride = stride;
  op.pad = pad;
  op.fused_post = residual ? FusedPost::EltwiseAdd : post;
  op.inputs = {input};
  if (residual) op.inputs.push_back(*residual);
  op.weights = tensor(id + ".w", {out_c, k, k, in[kC]});
  op.outputs = {tensor(id + ".out", {in[kN], oh, ow, out_c})};
  ops_.operators.push_back(std::move(op));
  return ops_.operators.back().outputs.front();
}

std::size_t OpListBuilder::depthwise(std::string id, std::size_t input, std::uint32_t k, std::uint32_t stride) {
  const auto in = at(input).dims;
  const std::uint32_t pad = k / 2;
  Operator op;
  op.id = id;
  op.opcode = Opcode::DepthwiseConv2D;
  op.kx = op.ky = k;
  op.stride = stride;
  op.pad = pad;
  op.fused_post = FusedPost::Activation;
  op.inputs = {input};
  op.weights = tensor(id + ".w", {1, k, k, in[kC]});
  op.outputs = {tensor(id + ".out", {in[kN], (in[kH] + 2 * pad - k) / stride + 1, (in[kW] + 2 * pad - k) / stride + 1,
                                     in[kC]})};
  ops_.operators.push_back(std::move(op));
  return ops_.operators.back().outputs.front();
}

std::size_t OpListBuilder::matmul(std::string id, std::size_t input, std::uint32_t out_c) {
  const auto in = at(input).dims;
  Operator op;
  op.id = id;
  op.opcode = Opcode::MatMul;
  op.inputs = {input};
  op.weights = tensor(id + ".w", {1, 1, out_c, in[kC]});
  op.outputs = {tensor(id + ".out", {in[kN], in[kH], in[kW], out_c})};
  ops_.operators.push_back(std::move(op));
  return ops_.operators.back().outputs.front();
}

std::size_t OpListBuilder::dsp(std::string id, Opcode opcode, std::vector<std::size_t> inputs, std::string kernel,
                               std::uint32_t k) {
  auto dims = at(inputs.front()).dims;
  if (opcode == Opcode::Pool && k > 1) {
    dims[kH] = (dims[kH] + k - 1) / k;
    dims[kW] = (dims[kW] + k - 1) / k;
  }
  Operator op;
  op.id = id;
  op.opcode = opcode;
  op.kx = op.ky = k;
  op.stride = k;
  op.kernel = std::move(kernel);
  op.inputs = std::move(inputs);
  op.outputs = {tensor(id + ".out", dims)};
  ops_.operators.push_back(std::move(op));
  return ops_.operators.back().outputs.front();
}

OpList conv_stack(std::uint32_t layers, std::uint32_t hw, std::uint32_t channels) {
  OpListBuilder b;
  auto x = b.tensor("input", {1, hw, hw, channels});
  for (std::uint32_t i = 0; i < layers; ++i) x = b.conv("conv" + std::to_string(i), x, channels, 3, 1);
  return b.take();
}

OpList resnet50_like() {
  OpListBuilder b;
  auto x = b.tensor("image", {1, 224, 224, 3});
  x = b.conv("conv1", x, 64, 7, 2);
  x = b.dsp("pool1", Opcode::Pool, {x}, "pool", 2);
  const std::uint32_t blocks[4] = {3, 4, 6, 3};
  const std::uint32_t widths[4] = {64, 128, 256, 512};
  for (int s = 0; s < 4; ++s) {
    for (std::uint32_t i = 0; i < blocks[s]; ++i) {
      const auto name = "res" + std::to_string(s + 2) + std::string(1, static_cast<char>('a' + i));
      const std::uint32_t stride = (i == 0 && s > 0) ? 2 : 1;
      const std::uint32_t w = widths[s];
      auto shortcut = x;
      if (i == 0) shortcut = b.conv(name + "_proj", x, 4 * w, 1, stride, FusedPost::BatchNorm);
      auto y = b.conv(name + "_1", x, w, 1, 1);
      y = b.conv(name + "_2", y, w, 3, stride);
      x = b.conv(name + "_3", y, 4 * w, 1, 1, FusedPost::Activation, shortcut);
    }
  }
  x = b.dsp("avgpool", Opcode::Pool, {x}, "pool", 7);
  x = b.matmul("fc", x, 1000);
  b.dsp("prob", Opcode::Softmax, {x}, "softmax");
  return b.take();
}

OpList memory_bound(std::uint32_t layers, std::uint32_t hw, std::uint32_t channels) {
  OpListBuilder b;
  auto a = b.tensor("a", {1, hw, hw, channels});
  auto x = b.tensor("b", {1, hw, hw, channels});
  for (std::uint32_t i = 0; i < layers; ++i) {
    x = b.dsp("add" + std::to_string(i), Opcode::Eltwise, {x, a}, "eltwise_add");
  }
  return b.take();
}

}  // namespace neusim::workload
