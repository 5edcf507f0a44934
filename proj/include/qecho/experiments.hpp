#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qecho/config.hpp"
#include "qecho/constants.hpp"
#include "qecho/detuning.hpp"
#include "qecho/ensemble.hpp"
#include "qecho/errors.hpp"
#include "qecho/format.hpp"
#include "qecho/metrics.hpp"
#include "qecho/model.hpp"
#include "qecho/predict.hpp"
#include "qecho/pulse.hpp"
#include "qecho/time_grid.hpp"
#include "qecho/trace_io.hpp"
#include "qecho/training.hpp"

namespace qecho {

inline TimeGrid config_time_grid(const ExperimentConfig& cfg) {
  return TimeGrid(cfg.t_start, cfg.t_end, cfg.dt);
}

inline PulseSequence config_pulses(const ExperimentConfig& cfg) {
  PulseSequence seq;
  for (const Pulse& p : cfg.pulses) seq.add(p);
  return seq;
}

// The adaptive solver's step size is capped at half the shortest pulse so a
// step accepted in a quiet stretch can never straddle a truncated envelope
// with every stage outside its support. Empty sequences leave the cap at inf.
inline SolverChoice config_solver(const ExperimentConfig& cfg) {
  SolverChoice solver = SolverChoice::adaptive_rk45(cfg.rtol, cfg.atol);
  solver.options.max_step = 0.5 * config_pulses(cfg).min_duration();
  return solver;
}

inline PolarizationTrace compute_reference(const ExperimentConfig& cfg) {
  const DetuningGrid grid = build_detuning_grid(cfg.range_mev, cfg.ensemble_count);
  const WeightDistribution w{cfg.fwhm_mev};
  return simulate_ensemble(grid, w, config_pulses(cfg), config_time_grid(cfg),
                           config_solver(cfg), cfg.threads);
}

inline TrainingConfig config_training(const ExperimentConfig& cfg) {
  TrainingConfig t;
  t.n_samples = cfg.n_samples;
  t.dt = cfg.dt;
  t.seed = cfg.seed;
  return t;
}

// Trains the surrogate selected by the config. The refined-grid variant
// places its training detunings on the same symmetric grid construction the
// ensemble uses, with `detuning_count` points spanning the full range.
inline KoopmanModel train_model(const ExperimentConfig& cfg) {
  const TrainingConfig t = config_training(cfg);
  if (cfg.variant == "be") return train_be(t);
  const DetuningGrid train_grid = build_detuning_grid(cfg.range_mev, cfg.detuning_count);
  return train_berg(t, train_grid.values);
}

inline PolarizationTrace predict_surrogate(const KoopmanModel& model,
                                           const ExperimentConfig& cfg) {
  const DetuningGrid grid = build_detuning_grid(cfg.range_mev, cfg.ensemble_count);
  const WeightDistribution w{cfg.fwhm_mev};
  return predict_ensemble(model, grid, w, config_pulses(cfg), config_time_grid(cfg),
                          cfg.threads);
}

struct EchoRunOutputs {
  PolarizationTrace reference;
  PolarizationTrace surrogate;
  ErrorReport report;
  KoopmanModel model;
};

inline EchoRunOutputs run_photon_echo(const ExperimentConfig& cfg) {
  PolarizationTrace reference = compute_reference(cfg);
  KoopmanModel model = train_model(cfg);
  PolarizationTrace surrogate = predict_surrogate(model, cfg);
  const ErrorReport report =
      make_error_report(reference, surrogate, cfg.echo_window_lo, cfg.echo_window_hi);
  return {std::move(reference), std::move(surrogate), report, std::move(model)};
}

inline std::vector<std::pair<std::string, std::string>> report_entries(
    const ExperimentConfig& cfg, const ErrorReport& report) {
  using detail::g17;
  return {
      {"experiment", cfg.experiment},
      {"variant", cfg.variant},
      {"ensemble_count", std::to_string(cfg.ensemble_count)},
      {"range_mev", g17(cfg.range_mev)},
      {"fwhm_mev", g17(cfg.fwhm_mev)},
      {"dt", g17(cfg.dt)},
      {"revival_time", g17(revival_time(cfg.ensemble_count, cfg.range_mev))},
      {"l2", g17(report.l2)},
      {"rel_peak", g17(report.rel_peak)},
      {"peak_time_ref", g17(report.peak_time_ref)},
      {"peak_time_model", g17(report.peak_time_model)},
      {"peak_value_ref", g17(report.peak_value_ref)},
      {"peak_value_model", g17(report.peak_value_model)},
  };
}

namespace detail {

// Shared sweep-row evaluation: a diverged surrogate yields inf metrics rather
// than aborting the sweep, so one bad row cannot mask the others.
inline SweepRow evaluate_sweep_row(double param, const ExperimentConfig& cfg,
                                   const KoopmanModel& model,
                                   const PolarizationTrace& reference) {
  SweepRow row{param, cfg.dt, std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity()};
  try {
    const PolarizationTrace surrogate = predict_surrogate(model, cfg);
    row.l2 = l2_error(reference, surrogate);
    row.rel_peak =
        relative_peak_error(reference, surrogate, cfg.echo_window_lo, cfg.echo_window_hi);
  } catch (const DivergenceError&) {
    // keep the inf sentinels
  }
  return row;
}

}  // namespace detail

// Accuracy of the two-operator surrogate as the detuning range grows. Each
// row gets its own reference because changing the range moves the whole
// ensemble grid.
inline std::vector<SweepRow> run_range_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep_ranges.empty()) {
    throw ConfigError("range sweep: config provides no sweep_ranges");
  }
  ExperimentConfig base = cfg;
  base.variant = "be";
  const KoopmanModel model = train_model(base);
  std::vector<SweepRow> rows;
  rows.reserve(cfg.sweep_ranges.size());
  for (const double range : cfg.sweep_ranges) {
    ExperimentConfig row_cfg = base;
    row_cfg.range_mev = range;
    const PolarizationTrace reference = compute_reference(row_cfg);
    rows.push_back(detail::evaluate_sweep_row(range, row_cfg, model, reference));
  }
  return rows;
}

// Accuracy of the refined-grid surrogate as the trained detuning grid is
// refined: m trained intervals means m + 1 grid points with the endpoints
// pinned to the full range. The reference does not depend on m, so it is
// computed once and shared by every row.
inline std::vector<SweepRow> run_m_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep_m_values.empty()) {
    throw ConfigError("m sweep: config provides no sweep_m_values");
  }
  ExperimentConfig base = cfg;
  base.variant = "berg";
  const PolarizationTrace reference = compute_reference(base);
  std::vector<SweepRow> rows;
  rows.reserve(cfg.sweep_m_values.size());
  for (const int m : cfg.sweep_m_values) {
    ExperimentConfig row_cfg = base;
    row_cfg.detuning_count = m + 1;
    const KoopmanModel model = train_model(row_cfg);
    rows.push_back(
        detail::evaluate_sweep_row(static_cast<double>(m), row_cfg, model, reference));
  }
  return rows;
}

// The convergence study is an m sweep on the narrow-distribution setup; the
// distinction lives in the config, not the algorithm.
inline std::vector<SweepRow> run_convergence_study(const ExperimentConfig& cfg) {
  return run_m_sweep(cfg);
}

}  // namespace qecho
