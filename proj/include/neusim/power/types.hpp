#pragma once

#include <optional>
#include <string>
#include <vector>

namespace neusim::power {

/// Leakage ratio grid indexed [temperature][voltage]. Axes strictly increasing.
struct LeakageLut {
  std::vector<double> temps_c;
  std::vector<double> voltages_v;
  std::vector<std::vector<double>> ratios;

  bool operator==(const LeakageLut&) const = default;
};

struct LeakageSpec {
  double p_lkg0_w = 0.0;
  double temp0_c = 25.0;
  double voltage0_v = 0.0;
  LeakageLut lut;

  bool operator==(const LeakageSpec&) const = default;
};

struct VfPoint {
  double freq_hz = 0.0;
  double volts = 0.0;

  bool operator==(const VfPoint&) const = default;
};

/// Frequency-to-voltage characterization, optionally charted at several
/// temperatures. Lookups use the chart nearest to the queried temperature.
struct VfCurve {
  struct Chart {
    double temp_c = 25.0;
    std::vector<VfPoint> points;

    bool operator==(const Chart&) const = default;
  };
  std::vector<Chart> charts;

  bool operator==(const VfCurve&) const = default;
};

/// One level of the power hierarchy. `binding` names the hardware model(s)
/// whose activity drives this node; `*` in a binding matches any run of
/// characters, so "tile*/dpu*" aggregates every DPU.
struct PowerNode {
  std::string name;
  LeakageSpec leakage;
  double cdyn_idle_f = 0.0;
  double cdyn_active_f = 0.0;
  VfCurve vf_curve;
  std::string clock;
  std::optional<std::string> binding;
  std::vector<PowerNode> children;

  bool operator==(const PowerNode&) const = default;
};

struct PowerConfig {
  double temp_c = 25.0;
  PowerNode root;

  bool operator==(const PowerConfig&) const = default;
};

}  // namespace neusim::power
