#include "doctest.h"
#include "neusim/error.hpp"
#include "neusim/power/model.hpp"
#include "neusim/power/trace.hpp"
#include "neusim/simulator.hpp"
#include "neusim/workload/compiler.hpp"
#include "neusim/workload/models.hpp"
#include "support.hpp"

using namespace neusim;
using namespace neusim::power;

namespace {

LeakageLut grid() {
  LeakageLut l;
  l.temps_c = {25, 85};
  l.voltages_v = {0.6, 1.0};
  l.ratios = {{1.0, 2.0}, {3.0, 6.0}};
  return l;
}

VfCurve line() {
  VfCurve c;
  c.charts.push_back({25, {{400e6, 0.6}, {800e6, 0.7}, {1200e6, 0.8}}});
  return c;
}

}  // namespace

TEST_CASE("leakage lookup interpolates bilinearly") {
  const auto l = grid();
  CHECK(lut_ratio(l, 25, 0.6) == 1.0);
  CHECK(lut_ratio(l, 85, 1.0) == 6.0);
  CHECK(lut_ratio(l, 55, 0.6) == doctest::Approx(2.0));
  CHECK(lut_ratio(l, 55, 0.8) == doctest::Approx(3.0));
  CHECK_THROWS_AS(lut_ratio(l, 100, 0.8), PowerError);
  CHECK_THROWS_AS(lut_ratio(l, 50, 0.5), PowerError);

  LeakageSpec s;
  s.p_lkg0_w = 0.2;
  s.temp0_c = 25;
  s.voltage0_v = 0.6;
  s.lut = l;
  CHECK(leakage_power(s, 25, 0.6) == doctest::Approx(0.2));
  CHECK(leakage_power(s, 85, 1.0) == doctest::Approx(1.2));
}

TEST_CASE("voltage follows the frequency curve") {
  const auto c = line();
  CHECK(f2v(c, 400e6, 25) == doctest::Approx(0.6));
  CHECK(f2v(c, 1000e6, 25) == doctest::Approx(0.75));
  CHECK(f2v(c, 1000e6, 90) == doctest::Approx(0.75));
  CHECK_THROWS_AS(f2v(c, 1300e6, 25), PowerError);
}

TEST_CASE("dynamic power scales with utilization, frequency and voltage squared") {
  PowerNode n;
  n.cdyn_idle_f = 1e-10;
  n.cdyn_active_f = 4e-10;
  CHECK(dynamic_power(n, 0.0, 1e9, 0.8) == doctest::Approx(1e-10 * 1e9 * 0.64));
  CHECK(dynamic_power(n, 0.5, 1e9, 0.8) == doctest::Approx(3e-10 * 1e9 * 0.64));
  CHECK(dynamic_power(n, 1.0, 2e9, 0.8) == doctest::Approx(2 * dynamic_power(n, 1.0, 1e9, 0.8)));
}

TEST_CASE("power tree validation") {
  auto cfg = *test::platform({}, true).power;
  CHECK_NOTHROW(validate(cfg));
  auto dup = cfg;
  dup.root.children.push_back(dup.root.children.front());
  CHECK_THROWS_AS(validate(dup), PowerError);
  auto bad = cfg;
  bad.root.leakage.lut.ratios[0][0] = -1;
  CHECK_THROWS_AS(validate(bad), PowerError);
}

TEST_CASE("glob patterns") {
  CHECK(glob_match("tile*/dpu*", "tile0/dpu1"));
  CHECK(glob_match("noc/*", "noc/cb0"));
  CHECK(glob_match("ddr", "ddr"));
  CHECK_FALSE(glob_match("ddr", "ddr0"));
  CHECK_FALSE(glob_match("tile0/dpu*", "tile1/dpu0"));
  CHECK(glob_match("*", ""));
}

TEST_CASE("activity is apportioned to intervals") {
  const auto iv = make_intervals(25000, 10000);
  REQUIRE(iv.size() == 3);
  CHECK(iv[2].t0 == 20000);
  CHECK(iv[2].t1 == 25000);
  CHECK_THROWS_AS(make_intervals(100, 0), PowerError);

  ActivityModel m;
  m.id = "x";
  m.capability = 2.0;
  m.own_mhz = 650;
  m.records = {{5000, 15000, 100}, {12000, 12000, 7}, {24000, 26000, 10}};
  const auto a = collect_activity(m, iv);
  CHECK(a[0] == doctest::Approx(50));
  CHECK(a[1] == doctest::Approx(57));
  CHECK(a[2] == doctest::Approx(10));
  CHECK(max_activity(m, 1300, 1000) == doctest::Approx(1000));
}

TEST_CASE("apportioning conserves a run's activity") {
  const auto cfg = test::platform();
  const auto run = simulate(cfg, workload::compile_reference(workload::conv_stack(2, 16, 64), cfg.platform));
  const auto iv = make_intervals(run.cycles, 997);
  for (const auto& m : run.activity.models()) {
    double sum = 0.0;
    for (double a : collect_activity(m, iv)) sum += a;
    CHECK(sum == doctest::Approx(static_cast<double>(m.total)).epsilon(1e-9));
  }
}

TEST_CASE("power trace roll-ups and energy") {
  const auto cfg = test::platform({}, true);
  ActivityLog log;
  const auto dpu = log.add_model("tile0/dpu0", config::EngineClass::Dpu, 4096, 1300);
  log.record(dpu, 0, 13000, 4096ull * 13000);
  for (const char* id : {"tile0/dsp0", "tile0/cb", "tile1/dpu0", "tile1/dsp0", "tile1/cb", "dma0", "noc/cb0", "ddr"}) {
    log.add_model(id, config::EngineClass::Dma, 1, 1300);
  }
  const auto trace = power_trace(*cfg.power, cfg.platform.freq_mhz, log, 26000, 13000);
  REQUIRE(trace.intervals.size() == 2);
  CHECK(trace.duration_seconds() == doctest::Approx(20e-6));
  std::size_t node = 0;
  for (std::size_t n = 0; n < trace.nodes.size(); ++n) {
    if (trace.nodes[n].path == "npu/tile0/dpu") node = n;
  }
  REQUIRE(node != 0);
  CHECK(trace.nodes[node].utilization[0] == doctest::Approx(1.0));
  CHECK(trace.nodes[node].utilization[1] == doctest::Approx(0.0));
  CHECK(trace.nodes[0].p_total[0] > trace.nodes[0].p_total[1]);
  const double energy = (trace.nodes[0].p_total[0] + trace.nodes[0].p_total[1]) * 10e-6;
  CHECK(trace.energy_j() == doctest::Approx(energy));
  CHECK(trace.average_w() == doctest::Approx(energy / 20e-6));
  CHECK(trace.peak_w() == trace.nodes[0].p_total[0]);

  ActivityLog too_busy;
  const auto m = too_busy.add_model("tile0/dpu0", config::EngineClass::Dpu, 1, 1300);
  too_busy.record(m, 0, 100, 1000);
  for (const auto& model : log.models()) {
    if (model.id != "tile0/dpu0") too_busy.add_model(model.id, model.engine_class, 1, 1300);
  }
  CHECK_THROWS_AS(power_trace(*cfg.power, cfg.platform.freq_mhz, too_busy, 100, 100), PowerError);
}
