#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qecho/constants.hpp"
#include "qecho/detuning.hpp"
#include "qecho/errors.hpp"
#include "qecho/parallel.hpp"
#include "qecho/polarization.hpp"
#include "qecho/pulse.hpp"
#include "qecho/rk4.hpp"
#include "qecho/rk45.hpp"
#include "qecho/time_grid.hpp"

namespace qecho {

struct SolverChoice {
  enum class Kind { rk4, rk45 };
  Kind kind = Kind::rk45;
  Rk45Options options{};

  static SolverChoice fixed_rk4() { return {Kind::rk4, {}}; }
  static SolverChoice adaptive_rk45(double rtol = 1e-8, double atol = 1e-11) {
    SolverChoice s;
    s.kind = Kind::rk45;
    s.options.rtol = rtol;
    s.options.atol = atol;
    return s;
  }
};

// Fixed reduction granularity: per-block partial sums are accumulated in
// ascending detuning order and combined in ascending block order, so the
// trace is bit-identical for every thread count.
inline constexpr std::size_t kEnsembleBlock = 64;

namespace detail {

// Shared deterministic reduction for reference simulation and prediction.
// per_tls(l, add_sample) must call add_sample(k, p_k) for k = 0..n-1 in order.
template <class PerTls>
PolarizationTrace reduce_ensemble(const DetuningGrid& grid,
                                  const WeightDistribution& w,
                                  const TimeGrid& tg, int threads,
                                  PhysConstants c, PerTls&& per_tls) {
  const std::size_t count = grid.values.size();
  if (count == 0) throw ConfigError("ensemble: empty detuning grid");
  const std::size_t n = tg.samples();

  std::vector<double> weights(count);
  for (std::size_t l = 0; l < count; ++l) {
    weights[l] = gaussian_weight(grid.values[l], w, c);
  }

  const std::size_t n_blocks = (count + kEnsembleBlock - 1) / kEnsembleBlock;
  std::vector<std::vector<std::complex<double>>> partial(n_blocks);

  for_each_block(count, kEnsembleBlock, threads,
                 [&](std::size_t b, std::size_t lo, std::size_t hi) {
                   auto& acc = partial[b];
                   acc.assign(n, {0.0, 0.0});
                   for (std::size_t l = lo; l < hi; ++l) {
                     const double sigma = weights[l];
                     per_tls(l, [&acc, sigma](std::size_t k, std::complex<double> p) {
                       acc[k] += sigma * p;
                     });
                   }
                 });

  PolarizationTrace trace{tg, std::vector<std::complex<double>>(n, {0.0, 0.0}),
                          static_cast<int>(count)};
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t k = 0; k < n; ++k) trace.values[k] += partial[b][k];
  }
  return trace;
}

}  // namespace detail

// Integrates every ensemble member from the ground state and accumulates the
// weighted polarization sum. Solver failures carry the detuning index.
inline PolarizationTrace simulate_ensemble(const DetuningGrid& grid,
                                           const WeightDistribution& w,
                                           const PulseSequence& seq,
                                           const TimeGrid& tg,
                                           const SolverChoice& solver,
                                           int threads = 0, PhysConstants c = {}) {
  auto omega = [&seq](double t) { return seq.rabi(t); };
  return detail::reduce_ensemble(
      grid, w, tg, threads, c, [&](std::size_t l, auto add_sample) {
        const double delta = grid.values[l];
        auto sink = [&add_sample](std::size_t k, const TlsState& x) {
          add_sample(k, std::complex<double>(x.p_re, x.p_im));
        };
        try {
          if (solver.kind == SolverChoice::Kind::rk4) {
            rk4_solve_into(TlsState{}, tg, omega, delta, sink);
          } else {
            rk45_solve_into(TlsState{}, tg, omega, delta, solver.options, sink);
          }
        } catch (const IntegrationError& e) {
          throw IntegrationError(
              "ensemble: detuning index " + std::to_string(l) + ": " + e.what(),
              e.time());
        }
      });
}

}  // namespace qecho
