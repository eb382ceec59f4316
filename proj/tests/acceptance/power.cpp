#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>

#include "acceptance/criteria.hpp"
#include "neusim/power/model.hpp"
#include "neusim/report.hpp"
#include "neusim/simulator.hpp"
#include "neusim/workload/compiler.hpp"
#include "neusim/workload/models.hpp"
#include "support.hpp"

namespace neusim::acceptance {

namespace {

void visit(const power::PowerNode& n, const std::function<void(const power::PowerNode&)>& f) {
  f(n);
  for (const auto& c : n.children) visit(c, f);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

Outcome power_identities() {
  const auto cfg = test::platform({"sim.power_enabled=true", "sim.pti_cycles=5000"}, true);
  const auto& pc = *cfg.power;
  Verdict v;

  // Leakage at (temp0, voltage0) and dynamic power at zero utilization.
  double worst_lkg = 0.0;
  double worst_idle = 0.0;
  visit(pc.root, [&](const power::PowerNode& n) {
    worst_lkg = std::max(worst_lkg, rel(power::leakage_power(n.leakage, n.leakage.temp0_c, n.leakage.voltage0_v),
                                        n.leakage.p_lkg0_w));
    const double f = 1.1e9, volts = 0.77;
    worst_idle = std::max(worst_idle, rel(power::dynamic_power(n, 0.0, f, volts), n.cdyn_idle_f * f * volts * volts));
  });

  // Energy over the trace against a mean built from whole-run activity
  // totals: dynamic power is linear in utilization, so the time average of
  // the trace equals the power at the run-average utilization.
  const auto run = simulate(cfg, workload::compile_reference(workload::conv_stack(10), cfg.platform));
  const auto trace = *report::evaluate_power(cfg, run);
  double sum_p_dt = 0.0;
  for (std::size_t k = 0; k < trace.intervals.size(); ++k) sum_p_dt += trace.nodes[0].p_total[k] * trace.interval_seconds(k);
  const double duration = run.seconds();
  double mean = 0.0;
  for (const auto& node : trace.nodes) {
    const auto* pn = &pc.root;
    // Locate the config node by path.
    std::string rest = node.path.substr(node.path.find('/') == std::string::npos ? node.path.size() : node.path.find('/') + 1);
    while (!rest.empty()) {
      const auto cut = rest.find('/');
      const auto name = rest.substr(0, cut);
      pn = &*std::find_if(pn->children.begin(), pn->children.end(), [&](const auto& c) { return c.name == name; });
      rest = cut == std::string::npos ? "" : rest.substr(cut + 1);
    }
    double act = 0.0, cap = 0.0;
    for (const auto& id : node.models) {
      const auto* m = run.activity.find(id);
      act += static_cast<double>(m->total);
      cap += m->capability * m->own_mhz / run.reference_mhz * static_cast<double>(run.cycles);
    }
    const double u = cap > 0 ? act / cap : 0.0;
    mean += power::leakage_power(pn->leakage, pc.temp_c, node.v_adj) +
            (pn->cdyn_idle_f + pn->cdyn_active_f * u) * node.freq_hz * node.v_adj * node.v_adj;
  }
  const double energy_err = rel(sum_p_dt, mean * duration);

  // Root against the flat sum of every node's own power.
  std::size_t root_mismatch = 0;
  for (std::size_t k = 0; k < trace.intervals.size(); ++k) {
    double flat = 0.0;
    for (std::size_t n = 0; n < trace.nodes.size(); ++n) flat += trace.nodes[n].p_lkg[k] + trace.nodes[n].p_dyn[k];
    if (flat != trace.nodes[0].p_total[k]) ++root_mismatch;
  }

  v << "leakage rel err " << worst_lkg << ", idle dynamic rel err " << worst_idle << ", energy vs mean*duration rel err "
    << energy_err << " over " << trace.intervals.size() << " intervals, root mismatches " << root_mismatch;
  v.require(worst_lkg < 1e-9, "leakage at the reference point differs from p_lkg0");
  v.require(worst_idle < 1e-12, "idle dynamic power differs from cdyn_idle*F*V^2");
  v.require(energy_err < 1e-3, "energy differs from mean*duration by more than 0.1%");
  v.require(root_mismatch == 0, "root differs from the sum of all nodes");
  return v.outcome();
}

Outcome resnet_runtime() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = test::platform({"tiles=2", "sim.power_enabled=true"}, true);
  const auto ops = workload::resnet50_like();
  std::size_t convs = 0;
  for (const auto& op : ops.operators) convs += op.opcode == workload::Opcode::Conv2D;
  const auto graph = workload::compile_reference(ops, cfg.platform);
  const auto run = simulate(cfg, graph);
  const auto power = report::evaluate_power(cfg, run);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v << convs << " convolutions, " << graph.tasks.size() << " tasks, " << run.cycles << " cycles, average power "
    << power->average_w() << " W, wall " << wall << " s";
  v.require(convs == 53, "expected 53 convolutions");
  v.require(wall < 300.0, "slower than 5 minutes");
  return v.outcome();
}

}  // namespace neusim::acceptance
