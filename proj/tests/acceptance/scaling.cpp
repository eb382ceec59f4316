#include <algorithm>
#include <chrono>

#include "acceptance/criteria.hpp"
#include "neusim/report.hpp"
#include "neusim/simulator.hpp"
#include "neusim/workload/compiler.hpp"
#include "neusim/workload/models.hpp"
#include "support.hpp"

namespace neusim::acceptance {

namespace {

std::vector<std::string> all_clocks(double mhz) {
  std::vector<std::string> out;
  for (const char* k : {"reference", "dpu", "dsp", "dma", "noc", "cb", "ddr"}) {
    out.push_back(std::string("freq_mhz.") + k + "=" + std::to_string(mhz));
  }
  return out;
}

}  // namespace

Outcome tile_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ops = workload::conv_stack(10);
  double latency[3] = {};
  const std::uint32_t tiles[3] = {1, 2, 4};
  for (int i = 0; i < 3; ++i) {
    const auto cfg = test::platform({"tiles=" + std::to_string(tiles[i])});
    latency[i] = static_cast<double>(simulate(cfg, workload::compile_reference(ops, cfg.platform)).cycles);
  }
  const double s12 = latency[0] / latency[1];
  const double s24 = latency[1] / latency[2];
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v << "speedup 1->2 " << s12 << ", 2->4 " << s24 << " (" << latency[0] << "/" << latency[1] << "/" << latency[2]
    << " cycles), " << wall << " s";
  v.require(s12 >= 1.6 && s12 <= 2.0, "speedup 1->2 outside [1.6, 2.0]");
  v.require(s24 <= s12, "speedup 2->4 exceeds speedup 1->2");
  v.require(wall < 60.0, "slower than 1 minute");
  return v.outcome();
}

Outcome frequency_scaling() {
  const auto ops = workload::conv_stack(10);
  std::vector<double> product;
  double p_lo = 0.0, p_hi = 0.0;
  for (double f = 600; f <= 1500; f += 100) {
    auto ov = all_clocks(f);
    ov.push_back("ddr.bw_bytes_per_cycle=1000000");
    ov.push_back("sim.power_enabled=true");
    const auto cfg = test::platform(ov, true);
    const auto run = simulate(cfg, workload::compile_reference(ops, cfg.platform));
    product.push_back(run.seconds() * f * 1e6);
    const auto power = report::evaluate_power(cfg, run);
    if (f == 600) p_lo = power->average_w();
    if (f == 1500) p_hi = power->average_w();
  }
  const auto [mn, mx] = std::minmax_element(product.begin(), product.end());
  const double spread = *mx / *mn - 1.0;
  Verdict v;
  v << "latency*frequency spread " << spread * 100 << "% over 600..1500 MHz, average power " << p_lo << " W -> " << p_hi
    << " W (ratio " << p_hi / p_lo << " vs frequency ratio 2.5)";
  v.require(spread <= 0.02, "latency*frequency not constant within 2%");
  v.require(p_hi / p_lo > 1500.0 / 600.0, "power ratio not above the frequency ratio");
  return v.outcome();
}

Outcome ddr_scaling() {
  const auto ops = workload::memory_bound();
  std::vector<sim::SimTime> latency;
  const double bws[] = {2, 4, 8, 16, 24, 32, 48, 64, 128, 256};
  for (double bw : bws) {
    const auto cfg = test::platform({"ddr.bw_bytes_per_cycle=" + std::to_string(bw)});
    latency.push_back(simulate(cfg, workload::compile_reference(ops, cfg.platform)).cycles);
  }
  const bool monotone = std::is_sorted(latency.rbegin(), latency.rend());
  Verdict v;
  v << "latency over ddr bw 2..256 B/cycle:";
  for (auto l : latency) v << " " << l;
  v.require(monotone, "latency increased with bandwidth");
  v.require(latency.front() > latency.back(), "bandwidth had no effect on a memory-bound model");
  return v.outcome();
}

}  // namespace neusim::acceptance
