#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "qecho/config.hpp"
#include "qecho/experiments.hpp"

using namespace qecho;
using Catch::Matchers::WithinAbs;

namespace {

// Small but physically meaningful setup: echo at t = 25 inside [-5, 32].
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.experiment = "photon_echo";
  cfg.ensemble_count = 128;
  cfg.range_mev = 2.0;
  cfg.fwhm_mev = 2.0;
  cfg.pulses = {{0.0, 2.5, std::numbers::pi / 2.0}, {12.5, 2.5, std::numbers::pi}};
  cfg.t_start = -5.0;
  cfg.t_end = 32.0;
  cfg.dt = 0.02;
  cfg.variant = "berg";
  cfg.detuning_count = 9;
  cfg.echo_window_lo = 20.0;
  cfg.echo_window_hi = 30.0;
  return cfg;
}

}  // namespace

TEST_CASE("solver step cap follows the shortest pulse") {
  ExperimentConfig cfg = tiny_config();
  REQUIRE(config_solver(cfg).options.max_step == 1.25);
  cfg.pulses.clear();
  REQUIRE(config_solver(cfg).options.max_step ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("undriven experiment produces a silent ensemble and surrogate") {
  ExperimentConfig cfg = tiny_config();
  cfg.pulses.clear();
  cfg.variant = "be";
  const PolarizationTrace ref = compute_reference(cfg);
  for (const auto& v : ref.values) {
    REQUIRE(v.real() == 0.0);
    REQUIRE(v.imag() == 0.0);
  }
  const KoopmanModel model = train_model(cfg);
  const PolarizationTrace pred = predict_surrogate(model, cfg);
  for (const auto& v : pred.values) {
    REQUIRE(std::abs(v) / 128.0 < 1e-10);
  }
}

TEST_CASE("full echo run is bit-identical across thread counts") {
  ExperimentConfig cfg = tiny_config();
  cfg.threads = 1;
  const EchoRunOutputs a = run_photon_echo(cfg);
  cfg.threads = 4;
  const EchoRunOutputs b = run_photon_echo(cfg);
  REQUIRE(a.reference.values == b.reference.values);
  REQUIRE(a.surrogate.values == b.surrogate.values);
  REQUIRE(a.report.l2 == b.report.l2);
  REQUIRE(a.report.rel_peak == b.report.rel_peak);
}

TEST_CASE("echo run recovers the expected peak and a usable surrogate") {
  const ExperimentConfig cfg = tiny_config();
  const EchoRunOutputs out = run_photon_echo(cfg);
  REQUIRE_THAT(out.report.peak_time_ref, WithinAbs(25.0, 2.5));
  REQUIRE(std::isfinite(out.report.l2));
  REQUIRE(out.report.l2 < 1e-2);
  REQUIRE(out.report.rel_peak < 0.5);
}

TEST_CASE("range sweep rows are independent of sweep order") {
  ExperimentConfig cfg = tiny_config();
  cfg.experiment = "range_sweep";
  cfg.variant = "be";
  cfg.ensemble_count = 64;
  cfg.sweep_ranges = {1.0, 2.0};
  const std::vector<SweepRow> ab = run_range_sweep(cfg);
  cfg.sweep_ranges = {2.0, 1.0};
  const std::vector<SweepRow> ba = run_range_sweep(cfg);
  REQUIRE(ab.size() == 2);
  REQUIRE(ba.size() == 2);
  REQUIRE(ab[0].param == ba[1].param);
  REQUIRE(ab[0].l2 == ba[1].l2);
  REQUIRE(ab[0].rel_peak == ba[1].rel_peak);
  REQUIRE(ab[1].l2 == ba[0].l2);
  for (const SweepRow& row : ab) REQUIRE(row.dt == cfg.dt);
}

TEST_CASE("grid refinement improves the surrogate on a resolved setup") {
  ExperimentConfig cfg = tiny_config();
  cfg.experiment = "m_sweep";
  cfg.ensemble_count = 64;
  cfg.sweep_m_values = {1, 8};
  const std::vector<SweepRow> rows = run_m_sweep(cfg);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].param == 1.0);
  REQUIRE(rows[1].param == 8.0);
  REQUIRE(std::isfinite(rows[0].l2));
  REQUIRE(std::isfinite(rows[1].l2));
  REQUIRE(rows[1].l2 < rows[0].l2);
}

TEST_CASE("sweep experiments demand their sweep parameters") {
  ExperimentConfig cfg = tiny_config();
  REQUIRE_THROWS_AS(run_range_sweep(cfg), ConfigError);
  REQUIRE_THROWS_AS(run_m_sweep(cfg), ConfigError);
}
