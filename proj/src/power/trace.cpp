#include "neusim/power/trace.hpp"

#include <algorithm>
#include <sstream>

#include "neusim/error.hpp"
#include "neusim/power/model.hpp"

namespace neusim::power {

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star = std::string_view::npos;
  std::size_t mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<Interval> make_intervals(sim::SimTime duration, std::uint64_t pti_cycles) {
  if (pti_cycles == 0) throw PowerError("power-trace interval must be >= 1 cycle");
  std::vector<Interval> out;
  for (sim::SimTime t = 0; t < duration; t += pti_cycles) out.push_back({t, std::min(duration, t + pti_cycles)});
  return out;
}

std::vector<double> collect_activity(const ActivityModel& model, const std::vector<Interval>& intervals) {
  std::vector<double> out(intervals.size(), 0.0);
  if (intervals.empty()) return out;
  const auto pti = intervals.front().t1 - intervals.front().t0;
  const auto last = intervals.size() - 1;
  for (const auto& r : model.records) {
    if (r.t1 == r.t0) {
      out[std::min<std::size_t>(r.t0 / pti, last)] += static_cast<double>(r.amount);
      continue;
    }
    const double rate = static_cast<double>(r.amount) / static_cast<double>(r.t1 - r.t0);
    const auto k0 = std::min<std::size_t>(r.t0 / pti, last);
    const auto k1 = std::min<std::size_t>((r.t1 - 1) / pti, last);
    for (auto k = k0; k <= k1; ++k) {
      // Activity past the end of the run is folded into the last interval.
      const auto lo = std::max(r.t0, intervals[k].t0);
      const auto hi = k == last ? r.t1 : std::min(r.t1, intervals[k].t1);
      out[k] += rate * static_cast<double>(hi - lo);
    }
  }
  return out;
}

double max_activity(const ActivityModel& model, double reference_mhz, sim::SimTime cycles) {
  return model.capability * model.own_mhz / reference_mhz * static_cast<double>(cycles);
}

double PowerTrace::interval_seconds(std::size_t k) const {
  return static_cast<double>(intervals[k].t1 - intervals[k].t0) / (reference_mhz * 1e6);
}

double PowerTrace::duration_seconds() const {
  return intervals.empty() ? 0.0 : static_cast<double>(intervals.back().t1) / (reference_mhz * 1e6);
}

double PowerTrace::energy_j(std::size_t node) const {
  double e = 0.0;
  for (std::size_t k = 0; k < intervals.size(); ++k) e += nodes[node].p_total[k] * interval_seconds(k);
  return e;
}

double PowerTrace::average_w(std::size_t node) const {
  const auto d = duration_seconds();
  return d > 0.0 ? energy_j(node) / d : 0.0;
}

double PowerTrace::peak_w(std::size_t node) const {
  const auto& p = nodes[node].p_total;
  return p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
}

namespace {

struct Flat {
  const PowerNode* node;
  NodeTrace trace;
};

void flatten(const PowerNode& node, const std::string& prefix, std::size_t depth, std::vector<Flat>& out) {
  const auto index = out.size();
  NodeTrace t;
  t.path = prefix.empty() ? node.name : prefix + "/" + node.name;
  t.depth = depth;
  out.push_back({&node, std::move(t)});
  for (const auto& child : node.children) flatten(child, out[index].trace.path, depth + 1, out);
  out[index].trace.end = out.size();
}

}  // namespace

PowerTrace power_trace(const PowerConfig& cfg, const config::Frequencies& freq_mhz, const ActivityLog& log,
                       sim::SimTime duration, std::uint64_t pti_cycles) {
  validate(cfg);
  PowerTrace out;
  out.reference_mhz = freq_mhz.reference;
  out.intervals = make_intervals(duration, pti_cycles);
  const auto n_pti = out.intervals.size();

  std::vector<Flat> flat;
  flatten(cfg.root, "", 0, flat);

  // Activity per model is binned once and shared by every node bound to it.
  const auto& models = log.models();
  std::vector<std::vector<double>> binned(models.size());
  for (auto& f : flat) {
    const auto& node = *f.node;
    auto& t = f.trace;
    const auto cls = config::engine_class_from_string(node.clock);
    if (!cls) throw PowerError("power node '" + t.path + "' uses unknown clock '" + node.clock + "'");
    t.freq_hz = freq_mhz.of(*cls) * 1e6;
    t.v_adj = f2v(node.vf_curve, t.freq_hz, cfg.temp_c);
    t.utilization.assign(n_pti, 0.0);
    if (node.binding) {
      std::vector<std::size_t> bound;
      for (std::size_t m = 0; m < models.size(); ++m) {
        if (glob_match(*node.binding, models[m].id)) bound.push_back(m);
      }
      if (bound.empty()) {
        throw PowerError("power node '" + t.path + "' binding '" + *node.binding + "' matches no hardware model");
      }
      for (std::size_t k = 0; k < n_pti; ++k) {
        double act = 0.0;
        double cap = 0.0;
        const auto cycles = out.intervals[k].t1 - out.intervals[k].t0;
        for (auto m : bound) {
          if (binned[m].empty()) binned[m] = collect_activity(models[m], out.intervals);
          act += binned[m][k];
          cap += max_activity(models[m], freq_mhz.reference, cycles);
        }
        double u = cap > 0.0 ? act / cap : 0.0;
        if (u < 0.0 || u > 1.0 + 1e-9) {
          std::ostringstream os;
          os << "power node '" << t.path << "' utilization " << u << " outside [0, 1] in interval " << k;
          throw PowerError(os.str());
        }
        t.utilization[k] = std::clamp(u, 0.0, 1.0);
      }
      for (auto m : bound) t.models.push_back(models[m].id);
    }
    const auto lkg = leakage_power(node.leakage, cfg.temp_c, t.v_adj);
    t.p_lkg.assign(n_pti, lkg);
    t.p_dyn.resize(n_pti);
    for (std::size_t k = 0; k < n_pti; ++k) t.p_dyn[k] = dynamic_power(node, t.utilization[k], t.freq_hz, t.v_adj);
  }

  for (auto& f : flat) out.nodes.push_back(std::move(f.trace));
  // Roll-ups add node-local powers over the contiguous pre-order subtree, so
  // the root is bit-identical to the flat sum over all nodes.
  for (std::size_t n = 0; n < out.nodes.size(); ++n) {
    auto& node = out.nodes[n];
    node.p_total.assign(n_pti, 0.0);
    for (std::size_t k = 0; k < n_pti; ++k) {
      double s = 0.0;
      for (auto d = n; d < node.end; ++d) s += out.local(d, k);
      node.p_total[k] = s;
    }
  }
  return out;
}

}  // namespace neusim::power
