#include <sstream>

#include "doctest.h"
#include "neusim/engines/compute.hpp"
#include "neusim/engines/dsp_curves.hpp"
#include "neusim/error.hpp"
#include "neusim/workload/models.hpp"
#include "support.hpp"

using namespace neusim;
using namespace neusim::engines;

namespace {

DspKernelCurve curve(std::uint64_t off, std::uint64_t cb, std::uint64_t cv, std::uint64_t cs, std::uint64_t bl,
                     std::uint64_t vl) {
  DspKernelCurve c;
  c.kernel = "k";
  c.offset = off;
  c.c_block = cb;
  c.c_vec = cv;
  c.c_scalar = cs;
  c.block_len = bl;
  c.vec_len = vl;
  return c;
}

}  // namespace

TEST_CASE("dsp kernel curve closed form") {
  const auto c = curve(100, 64, 8, 1, 128, 32);
  CHECK(dsp_kernel_cycles(c, 0) == 100);
  CHECK(dsp_kernel_cycles(c, 300) == 248);
  CHECK(dsp_kernel_cycles(c, 128) == 164);
  // These coefficients are not monotone: a full vector is cheaper than 31 scalars.
  CHECK(dsp_kernel_cycles(c, 32) < dsp_kernel_cycles(c, 31));
}

TEST_CASE("dsp curve tables parse and reject bad rows") {
  std::istringstream ok("kernel,offset,c_block,c_vec,c_scalar,block_len,vec_len\nrelu,24,16,4,0,128,32\n");
  const auto table = parse_dsp_curves_csv(ok);
  CHECK(table.size() == 1);
  CHECK(table.at("relu").c_block == 16);
  CHECK_THROWS_AS(table.at("gelu"), SimulationError);

  std::istringstream dup(
      "kernel,offset,c_block,c_vec,c_scalar,block_len,vec_len\nrelu,1,1,1,0,128,32\nrelu,1,1,1,0,128,32\n");
  CHECK_THROWS_AS(parse_dsp_curves_csv(dup), ConfigError);
  std::istringstream zero("kernel,offset,c_block,c_vec,c_scalar,block_len,vec_len\nrelu,1,1,1,0,0,32\n");
  CHECK_THROWS_AS(parse_dsp_curves_csv(zero), ConfigError);

  const auto shipped = load_dsp_curves(test::data_dir() / "dsp_kernels.csv");
  CHECK(shipped.size() == 20);
  CHECK(shipped.contains("softmax"));
}

TEST_CASE("stencil selection") {
  const auto p = test::platform().platform;
  CHECK(stencil_utilization({16, 16, 16}, 8, 8, p.dpu_array) == doctest::Approx(0.25));
  CHECK(stencil_utilization({16, 16, 16}, 64, 64, p.dpu_array) == doctest::Approx(1.0));
  CHECK(select_stencil(8, 8, p.dpu_array, p.stencil_set) == config::Stencil{16, 16, 16});
  CHECK(select_stencil(32, 8, p.dpu_array, p.stencil_set) == config::Stencil{32, 8, 16});
  CHECK(select_stencil(7, 40, p.dpu_array, p.stencil_set) == config::Stencil{8, 32, 16});
}

TEST_CASE("pipelined block latency") {
  CHECK(pipeline_cycles({}) == 0);
  CHECK(pipeline_cycles({{1, 2, 3, 4}}) == 10);
  CHECK(pipeline_cycles({{1, 2, 3, 4}, {5, 1, 1, 1}, {2, 9, 1, 1}}) == 24);
}

TEST_CASE("dpu partition covers the region exactly") {
  const auto p = test::platform().platform;
  workload::OpListBuilder b;
  const auto in = b.tensor("in", {1, 28, 28, 64});
  b.conv("c", in, 96, 3, 1);
  const auto ops = b.take();
  const auto& op = ops.operators.back();
  workload::Region r;
  r.extent = ops.tensors[op.outputs[0]].dims;
  const auto blocks = dpu_partition(ops.tensors, op, r, p);
  std::uint64_t macs = 0, elems = 0;
  for (const auto& blk : blocks) {
    macs += blk.macs;
    elems += blk.out_elems;
    CHECK(blk.input_bytes + blk.output_bytes <= p.dpu_array.block_buffer_bytes);
  }
  CHECK(macs == workload::op_compute_count(ops.tensors, op, r).macs);
  CHECK(elems == 28ull * 28 * 96);
}

TEST_CASE("dsp partition uses pipeline blocks of simd vectors") {
  const auto p = test::platform().platform;
  workload::OpListBuilder b;
  const auto in = b.tensor("in", {1, 4, 4, 64});
  b.dsp("act", workload::Opcode::Activation, {in}, "relu");
  const auto ops = b.take();
  const auto& op = ops.operators.back();
  workload::Region r;
  r.extent = ops.tensors[op.outputs[0]].dims;
  const auto blocks = dsp_partition(ops.tensors, op, r, p);
  REQUIRE(blocks.size() == 4);
  for (const auto& blk : blocks) CHECK(blk.elems == 256);
  const auto curves = load_dsp_curves(test::data_dir() / "dsp_kernels.csv");
  const auto st = dsp_stage_cycles(blocks[0], curves.at("relu"), p);
  CHECK(st[0] == 4);
  CHECK(st[1] == 24 + 16 * 2);
  CHECK(st[2] == 0);
  CHECK(st[3] == 4);
}
