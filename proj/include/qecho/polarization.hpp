#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qecho/time_grid.hpp"

namespace qecho {

// Weighted macroscopic polarization P(t_k) of an ensemble, one complex value
// per grid sample. `values` holds the raw weighted sum; normalized() divides
// by the ensemble size.
struct PolarizationTrace {
  TimeGrid grid;
  std::vector<std::complex<double>> values;
  int ensemble_count = 0;

  std::complex<double> normalized(std::size_t k) const {
    return values[k] / static_cast<double>(ensemble_count);
  }
};

}  // namespace qecho
