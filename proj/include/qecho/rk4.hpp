#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qecho/time_grid.hpp"
#include "qecho/tls_state.hpp"

namespace qecho {

// One classical Runge-Kutta step of width dt. The Rabi envelope is sampled at
// the stage times t, t + dt/2, and t + dt; the detuning is constant.
template <class OmegaFn>
TlsState rk4_step(const TlsState& x, double t, double dt, OmegaFn&& omega,
                  double delta) {
  const double om_0 = omega(t);
  const double om_h = omega(t + 0.5 * dt);
  const double om_1 = omega(t + dt);
  const TlsState k1 = obe_rhs(x, om_0, delta);
  const TlsState k2 = obe_rhs(x + (0.5 * dt) * k1, om_h, delta);
  const TlsState k3 = obe_rhs(x + (0.5 * dt) * k2, om_h, delta);
  const TlsState k4 = obe_rhs(x + dt * k3, om_1, delta);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fixed-step solve sampled on the grid; sink(k, state) is called for every
// grid index in order. A trailing partial interval is stepped at its
// shortened width.
template <class OmegaFn, class Sink>
void rk4_solve_into(const TlsState& x0, const TimeGrid& tg, OmegaFn&& omega,
                    double delta, Sink&& sink) {
  TlsState x = x0;
  const std::size_t n = tg.samples();
  for (std::size_t k = 0; k < n; ++k) {
    sink(k, x);
    if (k + 1 < n) x = rk4_step(x, tg.time(k), tg.step_width(k), omega, delta);
  }
}

template <class OmegaFn>
std::vector<TlsState> rk4_solve(const TlsState& x0, const TimeGrid& tg,
                                OmegaFn&& omega, double delta) {
  std::vector<TlsState> series;
  series.reserve(tg.samples());
  rk4_solve_into(x0, tg, std::forward<OmegaFn>(omega), delta,
                 [&series](std::size_t, const TlsState& x) { series.push_back(x); });
  return series;
}

}  // namespace qecho
