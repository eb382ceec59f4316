#include "neusim/power/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "neusim/error.hpp"

namespace neusim::power {

namespace {

// Segment [i, i+1] of a strictly increasing axis containing x, with the
// fractional position inside it. Single-point axes only accept that point.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x, const char* what) {
  if (axis.empty()) throw PowerError(std::string(what) + " axis is empty");
  if (!(x >= axis.front() && x <= axis.back())) {
    std::ostringstream os;
    os << what << " " << x << " outside table range [" << axis.front() << ", " << axis.back() << "]";
    throw PowerError(os.str());
  }
  if (axis.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  if (hi >= axis.size()) hi = axis.size() - 1;
  std::size_t lo = hi - 1;
  const double frac = (x - axis[lo]) / (axis[hi] - axis[lo]);
  return {lo, frac};
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

void validate_node(const PowerNode& node, const std::string& path) {
  if (node.name.empty()) throw PowerError("power node under '" + path + "' has an empty name");
  const auto here = path.empty() ? node.name : path + "/" + node.name;
  const auto& lut = node.leakage.lut;
  if (lut.temps_c.empty() || lut.voltages_v.empty()) throw PowerError(here + ": leakage table axes are empty");
  if (!strictly_increasing(lut.temps_c) || !strictly_increasing(lut.voltages_v)) {
    throw PowerError(here + ": leakage table axes must be strictly increasing");
  }
  if (lut.ratios.size() != lut.temps_c.size()) throw PowerError(here + ": leakage table needs one row per temperature");
  for (const auto& row : lut.ratios) {
    if (row.size() != lut.voltages_v.size()) throw PowerError(here + ": leakage table row length != voltage count");
    for (double r : row) {
      if (!(r > 0.0)) throw PowerError(here + ": leakage ratios must be > 0");
    }
  }
  try {
    lut_ratio(lut, node.leakage.temp0_c, node.leakage.voltage0_v);
  } catch (const PowerError&) {
    throw PowerError(here + ": leakage table does not cover the reference point (temp0_c, voltage0_v)");
  }
  if (node.leakage.p_lkg0_w < 0.0) throw PowerError(here + ": p_lkg0_w must be >= 0");
  if (node.cdyn_idle_f < 0.0 || node.cdyn_active_f < 0.0) throw PowerError(here + ": Cdyn values must be >= 0");
  if (node.vf_curve.charts.empty()) throw PowerError(here + ": VF curve has no chart");
  for (const auto& chart : node.vf_curve.charts) {
    if (chart.points.empty()) throw PowerError(here + ": VF chart has no points");
    for (std::size_t i = 1; i < chart.points.size(); ++i) {
      if (!(chart.points[i].freq_hz > chart.points[i - 1].freq_hz)) {
        throw PowerError(here + ": VF curve frequencies must be strictly increasing");
      }
      if (chart.points[i].volts < chart.points[i - 1].volts) {
        throw PowerError(here + ": VF curve voltages must be nondecreasing");
      }
    }
  }
  std::set<std::string> names;
  for (const auto& child : node.children) {
    if (!names.insert(child.name).second) throw PowerError(here + ": duplicate child name '" + child.name + "'");
    validate_node(child, here);
  }
}

}  // namespace

double lut_ratio(const LeakageLut& lut, double temp_c, double voltage_v) {
  auto [ti, tf] = locate(lut.temps_c, temp_c, "temperature");
  auto [vi, vf] = locate(lut.voltages_v, voltage_v, "voltage");
  const std::size_t ti1 = std::min(ti + 1, lut.temps_c.size() - 1);
  const std::size_t vi1 = std::min(vi + 1, lut.voltages_v.size() - 1);
  const double r00 = lut.ratios[ti][vi];
  const double r01 = lut.ratios[ti][vi1];
  const double r10 = lut.ratios[ti1][vi];
  const double r11 = lut.ratios[ti1][vi1];
  const double low = r00 + (r01 - r00) * vf;
  const double high = r10 + (r11 - r10) * vf;
  return low + (high - low) * tf;
}

double leakage_power(const LeakageSpec& spec, double temp_c, double voltage_v) {
  const double reference = lut_ratio(spec.lut, spec.temp0_c, spec.voltage0_v);
  if (temp_c == spec.temp0_c && voltage_v == spec.voltage0_v) return spec.p_lkg0_w;
  return spec.p_lkg0_w * lut_ratio(spec.lut, temp_c, voltage_v) / reference;
}

double f2v(const VfCurve& curve, double freq_hz, double temp_c) {
  if (curve.charts.empty()) throw PowerError("VF curve has no chart");
  const auto* chart = &curve.charts.front();
  for (const auto& c : curve.charts) {
    if (std::abs(c.temp_c - temp_c) < std::abs(chart->temp_c - temp_c)) chart = &c;
  }
  const auto& pts = chart->points;
  if (pts.empty()) throw PowerError("VF chart has no points");
  if (!(freq_hz >= pts.front().freq_hz && freq_hz <= pts.back().freq_hz)) {
    std::ostringstream os;
    os << "frequency " << freq_hz << " Hz outside VF curve span [" << pts.front().freq_hz << ", "
       << pts.back().freq_hz << "]";
    throw PowerError(os.str());
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].freq_hz == freq_hz) return pts[i].volts;
  }
  auto it = std::upper_bound(pts.begin(), pts.end(), freq_hz,
                             [](double f, const VfPoint& p) { return f < p.freq_hz; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return lo.volts + (hi.volts - lo.volts) * (freq_hz - lo.freq_hz) / (hi.freq_hz - lo.freq_hz);
}

double dynamic_power(const PowerNode& node, double utilization, double freq_hz, double v_adj) {
  if (!(utilization >= 0.0 && utilization <= 1.0)) {
    std::ostringstream os;
    os << "utilization " << utilization << " outside [0, 1] for node '" << node.name << "'";
    throw PowerError(os.str());
  }
  return (node.cdyn_idle_f + node.cdyn_active_f * utilization) * freq_hz * v_adj * v_adj;
}

void validate(const PowerConfig& cfg) { validate_node(cfg.root, ""); }

}  // namespace neusim::power
