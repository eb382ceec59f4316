#pragma once

// Closed-form power math for one power node:
//
//   P_total = P_lkg + P_dyn
//   P_lkg   = P_lkg0 * LUT(T, V) / LUT(T0, V0)
//   V_adj   = f2v(F, T)
//   P_dyn   = (Cdyn_idle + Cdyn_active * utilization) * F * V_adj^2
//
// Units are SI throughout: watts, farads, hertz, volts, degrees Celsius.
// Interpolation never extrapolates; queries outside a table throw PowerError.

#include "neusim/power/types.hpp"

namespace neusim::power {

/// Bilinear interpolation of the leakage ratio grid.
double lut_ratio(const LeakageLut& lut, double temp_c, double voltage_v);

double leakage_power(const LeakageSpec& spec, double temp_c, double voltage_v);

/// Piecewise-linear voltage lookup on the chart nearest to `temp_c`.
double f2v(const VfCurve& curve, double freq_hz, double temp_c);

double dynamic_power(const PowerNode& node, double utilization, double freq_hz, double v_adj);

/// Structural checks on a whole tree: table shapes, monotone axes, positive
/// ratios, reference point inside each leakage table, unique sibling names.
void validate(const PowerConfig& cfg);

}  // namespace neusim::power
