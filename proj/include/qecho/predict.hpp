#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qecho/ensemble.hpp"
#include "qecho/errors.hpp"
#include "qecho/lift.hpp"
#include "qecho/model.hpp"
#include "qecho/polarization.hpp"
#include "qecho/pulse.hpp"
#include "qecho/time_grid.hpp"

namespace qecho {

namespace detail {

inline void require_model_grid(const KoopmanModel& model, const TimeGrid& tg) {
  if (tg.has_partial_step()) {
    throw ConfigError("predict: dt must divide the time window exactly");
  }
  if (!(std::abs(tg.dt() - model.dt) <= 1e-12 * model.dt)) {
    throw ConfigError("predict: grid dt differs from the model step size");
  }
}

inline std::vector<double> sample_omegas(const PulseSequence& seq,
                                         const TimeGrid& tg) {
  const std::size_t n = tg.samples();
  std::vector<double> omegas(n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k + 1 < n; ++k) omegas[k] = seq.rabi(tg.time(k));
  return omegas;
}

// Iterates z_{k+1} = (K0 + omega_k B_omega + B(delta)) z_k and hands every
// lifted state to the sink. The envelope is sampled at the left endpoint of
// each step. Throws DivergenceError at the first non-finite state.
template <class Sink>
void iterate_lifted(const KoopmanModel& model, const TlsState& x0, double delta,
                    std::span<const double> omegas, std::size_t n_samples,
                    Sink&& sink) {
  const Matrix5d step_base = model.K0 + delta_operator(model, delta);
  Vector5d zv = lift(x0);
  for (std::size_t k = 0; k < n_samples; ++k) {
    sink(k, zv);
    if (k + 1 == n_samples) break;
    Vector5d next = step_base * zv;
    const double om = omegas[k];
    if (om != 0.0) next += om * (model.B_omega * zv);
    zv = next;
    if (!zv.allFinite()) {
      throw DivergenceError(
          "predict: lifted state diverged at step " + std::to_string(k + 1), k + 1);
    }
  }
}

}  // namespace detail

// Surrogate trajectory of one system, back-projected to the state space at
// every grid sample.
inline std::vector<TlsState> predict_trajectory(const KoopmanModel& model,
                                                const TlsState& x0, double delta,
                                                const PulseSequence& seq,
                                                const TimeGrid& tg) {
  detail::require_model_grid(model, tg);
  const std::vector<double> omegas = detail::sample_omegas(seq, tg);
  std::vector<TlsState> series;
  series.reserve(tg.samples());
  detail::iterate_lifted(model, x0, delta, omegas, tg.samples(),
                         [&](std::size_t, const Vector5d& zv) {
                           series.push_back(project_state(model.projector, zv));
                         });
  return series;
}

// Surrogate ensemble polarization; every member starts in the ground state.
// Uses the same deterministic blocked reduction as the reference simulation.
inline PolarizationTrace predict_ensemble(const KoopmanModel& model,
                                          const DetuningGrid& grid,
                                          const WeightDistribution& w,
                                          const PulseSequence& seq,
                                          const TimeGrid& tg, int threads = 0,
                                          PhysConstants c = {}) {
  detail::require_model_grid(model, tg);
  const std::vector<double> omegas = detail::sample_omegas(seq, tg);
  const std::size_t n = tg.samples();
  const Eigen::Matrix<double, 1, 5> row_p_re = model.projector.row(0);
  const Eigen::Matrix<double, 1, 5> row_p_im = model.projector.row(1);
  return detail::reduce_ensemble(
      grid, w, tg, threads, c, [&](std::size_t l, auto add_sample) {
        try {
          detail::iterate_lifted(
              model, TlsState{}, grid.values[l], omegas, n,
              [&](std::size_t k, const Vector5d& zv) {
                add_sample(k, std::complex<double>(row_p_re * zv, row_p_im * zv));
              });
        } catch (const DivergenceError& e) {
          throw DivergenceError(
              "ensemble: detuning index " + std::to_string(l) + ": " + e.what(),
              e.step());
        }
      });
}

}  // namespace qecho
