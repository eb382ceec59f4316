#include "doctest.h"
#include "neusim/error.hpp"
#include "neusim/memory/cb.hpp"
#include "neusim/memory/ddr.hpp"
#include "neusim/memory/dma.hpp"
#include "neusim/timebase.hpp"
#include "support.hpp"

using namespace neusim;
using namespace neusim::memory;

TEST_CASE("clock conversion") {
  const Clock same(1300, 1300);
  CHECK(same.cycles(17) == 17);
  CHECK(same.transfer(128, 64) == 2);
  CHECK(same.transfer(129, 64) == 3);
  const Clock half(650, 1300);
  CHECK(half.cycles(3) == 6);
  CHECK(half.transfer(128, 64) == 4);
  const Clock fast(1500, 600);
  CHECK(fast.cycles(5) == 2);
  CHECK(fast.per_ref_cycle(10) == doctest::Approx(25));
}

TEST_CASE("compute buffer ports serialize accesses") {
  const auto p = test::platform().platform;
  ComputeBuffer cb(p.cb, Clock(1300, 1300));
  const auto a = cb.access(0, 0, 128);
  CHECK(a.start == 0);
  CHECK(a.end == 2);
  CHECK(a.ready == 6);
  const auto b = cb.access(0, 1, 64);
  CHECK(b.start == 2);
  CHECK(b.end == 3);
  CHECK(b.ready == 7);
  const auto c = cb.access_any(0, 64);
  CHECK(c.start == 0);
  const auto d = cb.access(0, 10, 64);
  CHECK(d.start == 10);
}

TEST_CASE("ddr address mapping interleaves pages across banks") {
  const auto p = test::platform().platform.ddr;
  CHECK(ddr_map_address(0, p) == DdrAddress{0, 0, 0});
  CHECK(ddr_map_address(100, p) == DdrAddress{0, 0, 100});
  CHECK(ddr_map_address(2048, p) == DdrAddress{1, 0, 0});
  CHECK(ddr_map_address(8 * 2048 + 5, p) == DdrAddress{0, 1, 5});
}

TEST_CASE("ddr row states and page policies") {
  auto cfg = test::platform({"ddr.refresh_interval=0"}).platform;
  SUBCASE("open page: first burst activates, second hits") {
    Ddr ddr(cfg.ddr, Clock(1300, 1300));
    CHECK(ddr.command_cycles(RowState::Hit) == 14);
    CHECK(ddr.command_cycles(RowState::Closed) == 28);
    CHECK(ddr.command_cycles(RowState::Miss) == 42);
    const auto r = ddr.access(0, 128, 0);
    CHECK(r.bursts == 2);
    CHECK(r.closed == 1);
    CHECK(r.hits == 1);
    // 28 + 2 for the first burst; the second CAS issues at 16, data at 30.
    CHECK(r.done == 32);
    const auto miss = ddr.access(8 * 2048, 64, 32);
    CHECK(miss.misses == 1);
  }
  SUBCASE("closed page precharges after every burst") {
    cfg.ddr.page_policy = config::PagePolicy::Closed;
    Ddr ddr(cfg.ddr, Clock(1300, 1300));
    const auto r = ddr.access(0, 128, 0);
    CHECK(r.closed == 2);
    CHECK(r.done == 30 + 14 + 28 + 2);
  }
  SUBCASE("partial bursts occupy a full burst slot") {
    Ddr ddr(cfg.ddr, Clock(1300, 1300));
    CHECK(ddr.access(10, 4, 0).done == 30);
  }
}

TEST_CASE("dma descriptors split into requests") {
  workload::DmaDescriptor d;
  SUBCASE("contiguous rows merge and split at the request size") {
    d.dims = {4, 2500};
    const auto reqs = dma_split_descriptor(d, 4096);
    REQUIRE(reqs.size() == 3);
    CHECK(reqs[0] == DmaRequest{0, 0, 4096, 4096});
    CHECK(reqs[1] == DmaRequest{4096, 4096, 4096, 4096});
    CHECK(reqs[2] == DmaRequest{8192, 8192, 1808, 1808});
  }
  SUBCASE("strided rows stay separate") {
    d.dims = {3, 100};
    d.src_strides = {128};
    const auto reqs = dma_split_descriptor(d, 4096);
    REQUIRE(reqs.size() == 3);
    CHECK(reqs[1] == DmaRequest{128, 100, 100, 100});
    CHECK(reqs[2] == DmaRequest{256, 200, 100, 100});
  }
  SUBCASE("inline compression shrinks the destination stream") {
    d.dims = {1000};
    d.inline_op = workload::InlineOp::Compress;
    d.ratio = 0.5;
    const auto reqs = dma_split_descriptor(d, 256);
    std::uint64_t src = 0, dst = 0;
    for (const auto& r : reqs) {
      src += r.src_bytes;
      dst += r.dst_bytes;
    }
    CHECK(src == 1000);
    CHECK(dst == 500);
  }
  SUBCASE("empty descriptors are rejected") {
    d.dims = {0};
    CHECK_THROWS_AS(dma_split_descriptor(d, 4096), WorkloadError);
  }
}
