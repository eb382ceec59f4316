#include <algorithm>
#include <random>

#include "acceptance/criteria.hpp"
#include "neusim/engines/dsp_curves.hpp"
#include "neusim/simulator.hpp"
#include "support.hpp"

namespace neusim::acceptance {

namespace {

// Walks the element stream the way the kernel does: whole unrolled blocks,
// then whole vectors, then single elements.
std::uint64_t stepwise_cost(const engines::DspKernelCurve& c, std::uint64_t n) {
  std::uint64_t cycles = c.offset;
  while (n >= c.block_len) {
    cycles += c.c_block;
    n -= c.block_len;
  }
  while (n >= c.vec_len) {
    cycles += c.c_vec;
    n -= c.vec_len;
  }
  return cycles + n * c.c_scalar;
}

}  // namespace

Outcome dsp_curves() {
  const auto table = engines::load_dsp_curves(test::data_dir() / "dsp_kernels.csv");
  // gelu: offset 80, c_block 156, c_vec 40, c_scalar 1, block 128, vec 32.
  const std::pair<std::uint64_t, std::uint64_t> points[20] = {
      {0, 80},    {1, 81},    {31, 111},  {32, 120},  {33, 121},  {63, 151},  {64, 160},
      {95, 191},  {127, 231}, {128, 236}, {129, 237}, {160, 276}, {200, 324}, {255, 387},
      {256, 392}, {300, 444}, {383, 543}, {384, 548}, {450, 630}, {512, 704}};
  const auto& gelu = table.at("gelu");
  Verdict v;
  int exact = 0;
  for (const auto& [n, cycles] : points) {
    const auto got = engines::dsp_kernel_cycles(gelu, n);
    if (got == cycles && got == stepwise_cost(gelu, n)) ++exact;
  }
  std::size_t monotone = 0;
  for (const auto& name : table.names()) {
    const auto& c = table.at(name);
    bool ok = true;
    for (std::uint64_t n = 0; n < 4 * c.block_len; ++n) {
      ok = ok && engines::dsp_kernel_cycles(c, n) <= engines::dsp_kernel_cycles(c, n + 1) &&
           engines::dsp_kernel_cycles(c, n) == stepwise_cost(c, n);
    }
    monotone += ok;
  }
  v << exact << "/20 table rows exact, " << monotone << "/" << table.size()
    << " kernels monotone and exact on [0, 4*block_len]";
  v.require(exact == 20, "table rows differ");
  v.require(monotone == table.size(), "a kernel curve is not monotone");
  return v.outcome();
}

// Single-task graphs with random shapes, endpoints, clocks and bandwidths.
// The achieved rate (destination bytes over task duration, in bytes per
// reference cycle) may never beat the slowest of channel, NOC port and memory.
Outcome dma_bandwidth() {
  std::mt19937_64 rng(20240607);
  auto pick = [&](auto lo, auto hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  const double bws[] = {4, 8, 16, 24, 32, 64, 128};
  const double freqs[] = {600, 800, 1000, 1300, 1600};
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double dma_bw = bws[pick(0, 6)];
    const double noc_bw = bws[pick(0, 6)];
    const double ddr_bw = bws[pick(0, 6)];
    const double cb_bw = bws[pick(0, 6)];
    const double f_dma = freqs[pick(0, 4)], f_noc = freqs[pick(0, 4)], f_ddr = freqs[pick(0, 4)],
                 f_cb = freqs[pick(0, 4)];
    auto num = [](double x) { return std::to_string(x); };
    auto cfg = test::platform({"dma.bw_bytes_per_cycle=" + num(dma_bw), "noc.port_bw_bytes_per_cycle=" + num(noc_bw),
                               "ddr.bw_bytes_per_cycle=" + num(ddr_bw), "cb.bw_bytes_per_cycle=" + num(cb_bw),
                               "freq_mhz.dma=" + num(f_dma), "freq_mhz.noc=" + num(f_noc),
                               "freq_mhz.ddr=" + num(f_ddr), "freq_mhz.cb=" + num(f_cb),
                               "dma.outstanding=" + std::to_string(pick(1, 16)),
                               "dma.max_request_bytes=" + std::to_string(64 << pick(0, 7))});
    const auto& p = cfg.platform;
    const double ref = p.freq_mhz.reference;

    // Endpoints: 0 = DDR->CB, 1 = CB->DDR, 2 = CB->CB (other tile), 3 = DDR->DDR.
    const int kind = static_cast<int>(pick(0, 3));
    const std::uint64_t rows = pick(1, 64), row_bytes = pick(1, 2048), pad = pick(0, 256);
    const std::uint64_t span = rows * (row_bytes + pad);
    test::GraphBuilder b;
    const workload::Dims dims{1, 1, 1, static_cast<std::uint32_t>(span)};
    const auto src = kind == 0 || kind == 3 ? b.ddr("src", dims, pick(0, 1 << 20)) : b.cb("src", dims, 0, 0);
    const auto dst = kind == 1 || kind == 3 ? b.ddr("dst", dims, (8u << 20) + pick(0, 1 << 20))
                                            : b.cb("dst", dims, kind == 2 ? 1 : 0, 0);
    workload::DmaDescriptor d;
    d.src = src;
    d.dst = dst;
    d.dims = {rows, row_bytes};
    d.src_strides = {row_bytes + (pick(0, 1) ? pad : 0)};
    d.dst_strides = {row_bytes + (pick(0, 1) ? pad : 0)};
    b.g.tasks.push_back({"copy", workload::DmaTask{static_cast<std::uint32_t>(pick(0, p.dma.channels - 1)), {d}}, {}, {}});
    const auto run = simulate(cfg, b.g);

    const auto& t = run.timings.front();
    const double achieved = static_cast<double>(rows * row_bytes) / static_cast<double>(*t.end - *t.start);
    const bool ddr = kind != 2;
    const double mem = ddr ? ddr_bw * f_ddr : cb_bw * p.cb.ports * f_cb;
    const double bound = std::min({dma_bw * f_dma, noc_bw * f_noc, mem}) / ref;
    worst = std::max(worst, achieved / bound);
    if (achieved > bound * (1 + 1e-12)) ++violations;
  }
  Verdict v;
  v << "500 cases, " << violations << " over the bound, highest achieved/bound ratio " << worst;
  v.require(violations == 0, "bound violated");
  return v.outcome();
}

}  // namespace neusim::acceptance
