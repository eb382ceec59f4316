#include "neusim/report.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "neusim/error.hpp"

namespace neusim::report {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_timeline(std::ostream& out, const Trace& trace, double reference_mhz) {
  using json = nlohmann::ordered_json;
  json events = json::array();
  for (std::size_t t = 0; t < trace.tracks.size(); ++t) {
    events.push_back({{"name", "thread_name"}, {"ph", "M"}, {"pid", 0}, {"tid", t}, {"args", {{"name", trace.tracks[t]}}}});
  }
  const auto us = [reference_mhz](sim::SimTime c) { return static_cast<double>(c) / reference_mhz; };
  for (const auto& e : trace.events) {
    json args = json::object();
    for (const auto& [k, v] : e.meta) args[k] = v;
    args["t_start_cycles"] = e.t_start;
    args["t_end_cycles"] = e.t_end;
    events.push_back({{"name", e.task},
                      {"cat", std::string(to_string(e.kind))},
                      {"ph", "X"},
                      {"ts", us(e.t_start)},
                      {"dur", us(e.t_end) - us(e.t_start)},
                      {"pid", 0},
                      {"tid", e.track},
                      {"args", std::move(args)}});
  }
  json doc = {{"traceEvents", std::move(events)}, {"displayTimeUnit", "ns"}};
  out << doc.dump(1) << '\n';
}

const Metric* Summary::find(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

double Summary::number(const std::string& name) const {
  const auto* m = find(name);
  if (!m) throw std::out_of_range("no metric '" + name + "'");
  return std::stod(m->value);
}

Summary summarize(const config::SimConfig& cfg, const RunResult& run, const power::PowerTrace* power) {
  Summary s;
  auto add = [&](std::string name, double v, std::string unit) {
    s.metrics.push_back({std::move(name), format_number(v), std::move(unit)});
  };
  auto add_int = [&](std::string name, std::uint64_t v, std::string unit) {
    s.metrics.push_back({std::move(name), std::to_string(v), std::move(unit)});
  };
  const auto& p = cfg.platform;
  const double seconds = run.seconds();
  add_int("latency_cycles", run.cycles, "cycles");
  add("latency_ms", seconds * 1e3, "ms");
  add("reference_mhz", run.reference_mhz, "MHz");
  add("fps", seconds > 0 ? 1.0 / seconds : 0.0, "1/s");
  add_int("tasks", run.timings.size(), "count");
  add_int("macs", run.macs, "ops");
  add_int("dsp_elems", run.dsp_elems, "elems");
  add_int("dma_bytes", run.dma_bytes, "bytes");
  add_int("ddr_bytes", run.ddr_bytes, "bytes");
  add("ddr_bw_achieved", seconds > 0 ? static_cast<double>(run.ddr_bytes) / seconds / 1e9 : 0.0, "GB/s");
  add("ddr_bw_peak", p.ddr.bw_bytes_per_cycle * p.freq_mhz.ddr * 1e6 / 1e9, "GB/s");
  const double mac_peak = static_cast<double>(p.dpu_array.rows) * p.dpu_array.cols * p.dpu_array.macs_per_cell *
                          p.freq_mhz.dpu / p.freq_mhz.reference * p.tiles * p.dpus_per_tile *
                          static_cast<double>(run.cycles);
  add("mac_utilization", mac_peak > 0 ? static_cast<double>(run.macs) / mac_peak : 0.0, "ratio");
  for (const auto& e : run.engines) {
    add_int("busy_cycles." + e.name, e.busy, "cycles");
    add("busy_fraction." + e.name, run.cycles ? static_cast<double>(e.busy) / static_cast<double>(run.cycles) : 0.0,
        "ratio");
  }
  if (power) {
    const auto energy = power->energy_j();
    add("power_avg_w", power->average_w(), "W");
    add("power_peak_w", power->peak_w(), "W");
    add("energy_j", energy, "J");
    add("inferences_per_j", energy > 0 ? 1.0 / energy : 0.0, "1/J");
  }
  return s;
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
  out << "metric,value,unit\n";
  out << "schema," << kSummarySchema << ",\n";
  for (const auto& m : summary.metrics) out << m.name << ',' << m.value << ',' << m.unit << '\n';
}

void write_power_csv(std::ostream& out, const power::PowerTrace& trace) {
  out << "pti_index,node_path,p_lkg_w,p_dyn_w,p_total_w\n";
  for (std::size_t k = 0; k < trace.intervals.size(); ++k) {
    for (std::size_t n = 0; n < trace.nodes.size(); ++n) {
      const auto& node = trace.nodes[n];
      double lkg = 0.0;
      double dyn = 0.0;
      for (auto d = n; d < node.end; ++d) {
        lkg += trace.nodes[d].p_lkg[k];
        dyn += trace.nodes[d].p_dyn[k];
      }
      out << k << ',' << node.path << ',' << format_number(lkg) << ',' << format_number(dyn) << ','
          << format_number(node.p_total[k]) << '\n';
    }
  }
}

std::optional<power::PowerTrace> evaluate_power(const config::SimConfig& cfg, const RunResult& run) {
  if (!cfg.sim.power_enabled) return std::nullopt;
  if (!cfg.power) throw ConfigError("key 'sim.power_enabled' is set but the configuration has no 'power' section");
  if (cfg.sim.pti_cycles == 0) throw ConfigError("key 'sim.pti_cycles' must be >= 1 when power is enabled");
  return power::power_trace(*cfg.power, cfg.platform.freq_mhz, run.activity, run.cycles, cfg.sim.pti_cycles);
}

}  // namespace neusim::report
