#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qecho/constants.hpp"
#include "qecho/errors.hpp"

namespace qecho {

// Gaussian inhomogeneous broadening, parameterized by its FWHM in meV.
struct WeightDistribution {
  double fwhm_mev = 7.5;
};

// Statistical weight of a transition detuned by `delta` (rad/ps).
// Normalized to 1 at delta = 0; falls to 1/2 where hbar*delta = fwhm/2.
inline double gaussian_weight(double delta, const WeightDistribution& w,
                              PhysConstants c = {}) {
  if (!(w.fwhm_mev > 0.0)) throw ConfigError("weight distribution: fwhm must be positive");
  const double arg =
      2.0 * std::sqrt(2.0 * std::numbers::ln2) * c.hbar_mev_ps * delta / w.fwhm_mev;
  return std::exp(-0.5 * arg * arg);
}

// Evenly spaced ensemble detunings covering [-range, +range] (range in meV,
// values in rad/ps). Exactly antisymmetric: values[l] == -values[N-1-l].
struct DetuningGrid {
  double range_mev = 0.0;
  std::vector<double> values;

  int count() const { return static_cast<int>(values.size()); }
};

inline DetuningGrid build_detuning_grid(double range_mev, int count,
                                        PhysConstants c = {}) {
  if (count < 2) throw ConfigError("detuning grid: need at least two points");
  if (!(range_mev > 0.0) || !std::isfinite(range_mev)) {
    throw ConfigError("detuning grid: range must be positive and finite");
  }
  DetuningGrid g;
  g.range_mev = range_mev;
  g.values.resize(static_cast<std::size_t>(count));
  const double edge = range_mev / c.hbar_mev_ps;
  // (2l - (N-1)) / (N-1) negates exactly under l -> N-1-l, which keeps the
  // grid bit-antisymmetric and pins the endpoints to +-edge.
  for (int l = 0; l < count; ++l) {
    const double num = static_cast<double>(2 * l - (count - 1));
    g.values[static_cast<std::size_t>(l)] = edge * (num / static_cast<double>(count - 1));
  }
  return g;
}

// Period of the spurious signal copies introduced by discretizing the
// detuning distribution: 2*pi / (grid spacing).
inline double revival_time(int count, double range_mev, PhysConstants c = {}) {
  if (count < 2) throw ConfigError("revival time: need at least two grid points");
  if (!(range_mev > 0.0)) throw ConfigError("revival time: range must be positive");
  return c.hbar_mev_ps * std::numbers::pi * static_cast<double>(count - 1) / range_mev;
}

}  // namespace qecho
