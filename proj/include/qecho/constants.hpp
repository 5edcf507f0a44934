#pragma once

namespace qecho {

// Unit system: times in ps, energies in meV, rates and detunings in rad/ps.
struct PhysConstants {
  double hbar_mev_ps = 0.6582119569;  // reduced Planck constant, meV*ps
};

}  // namespace qecho
