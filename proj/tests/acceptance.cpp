// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "acceptance/criteria.hpp"

int main() {
  using namespace neusim::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"determinism", determinism},
      {"exact closed-form oracle", exact_oracle},
      {"compute bound", compute_bound},
      {"DSP curve exactness", dsp_curves},
      {"DMA bandwidth bound", dma_bandwidth},
      {"barrier semantics", barrier_semantics},
      {"tile scaling", tile_scaling},
      {"frequency scaling", frequency_scaling},
      {"DDR bandwidth scaling", ddr_scaling},
      {"power identities", power_identities},
      {"ResNet-50 runtime", resnet_runtime},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), s);
    std::fflush(stdout);
  }
  return failed;
}
