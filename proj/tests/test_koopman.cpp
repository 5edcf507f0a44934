#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "qecho/errors.hpp"
#include "qecho/lift.hpp"
#include "qecho/model.hpp"
#include "qecho/model_io.hpp"
#include "qecho/pinv.hpp"
#include "qecho/predict.hpp"
#include "qecho/pulse.hpp"
#include "qecho/rk4.hpp"
#include "qecho/time_grid.hpp"
#include "qecho/training.hpp"

using namespace qecho;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TlsState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TlsState x;
  x.p_re = u(rng);
  x.p_im = u(rng);
  x.n_re = u(rng);
  x.n_im = u(rng);
  return x;
}

double matrix_max_diff(const Matrix5d& a, const Matrix5d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("lifting prepends a constant observable") {
  const TlsState x{0.1, -0.2, 0.3, -0.4};
  const Vector5d z = lift(x);
  REQUIRE(z(0) == 1.0);
  REQUIRE(z(1) == 0.1);
  REQUIRE(z(2) == -0.2);
  REQUIRE(z(3) == 0.3);
  REQUIRE(z(4) == -0.4);
}

TEST_CASE("pseudoinverse inverts full-rank and truncates singular directions") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
  REQUIRE(((pseudoinverse(eye) - eye).cwiseAbs().maxCoeff()) < 1e-14);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const Eigen::MatrixXd dp = pseudoinverse(d);
  REQUIRE_THAT(dp(0, 0), WithinRel(0.5, 1e-14));
  REQUIRE_THAT(dp(1, 1), WithinRel(1.0, 1e-14));
  REQUIRE(dp(2, 2) == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(5, 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = u(rng);
  const Eigen::MatrixXd ap = pseudoinverse(a);
  REQUIRE(((a * ap * a - a).cwiseAbs().maxCoeff()) < 1e-12);
  REQUIRE(((ap * a * ap - ap).cwiseAbs().maxCoeff()) < 1e-12);
  REQUIRE((((a * ap).transpose() - a * ap).cwiseAbs().maxCoeff()) < 1e-12);
  REQUIRE((((ap * a).transpose() - ap * a).cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("zero-control operator is the identity") {
  TrainingConfig cfg;
  const Matrix5d k0 = train_operator({0.0, 0.0}, cfg);
  REQUIRE(matrix_max_diff(k0, Matrix5d::Identity()) < 1e-10);
}

TEST_CASE("pure-detuning operator rotates the coherence block") {
  TrainingConfig cfg;
  const Matrix5d k = train_operator({0.0, 1.0}, cfg);
  const double c = std::cos(cfg.dt);
  const double s = std::sin(cfg.dt);
  REQUIRE_THAT(k(1, 1), WithinAbs(c, 1e-10));
  REQUIRE_THAT(k(1, 2), WithinAbs(s, 1e-10));
  REQUIRE_THAT(k(2, 1), WithinAbs(-s, 1e-10));
  REQUIRE_THAT(k(2, 2), WithinAbs(c, 1e-10));
  const double det = k(1, 1) * k(2, 2) - k(1, 2) * k(2, 1);
  REQUIRE_THAT(det, WithinAbs(1.0, 1e-10));
  // constants map to constants, occupations are untouched
  REQUIRE_THAT(k(0, 0), WithinAbs(1.0, 1e-10));
  REQUIRE_THAT(k(3, 3), WithinAbs(1.0, 1e-10));
  for (int j = 1; j < 5; ++j) REQUIRE_THAT(k(0, j), WithinAbs(0.0, 1e-10));
}

TEST_CASE("projector undoes the lift") {
  const KoopmanModel model = train_be(TrainingConfig{});
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const TlsState x = random_state(rng);
    const TlsState back = project_state(model.projector, lift(x));
    REQUIRE_THAT(back.p_re, WithinAbs(x.p_re, 1e-10));
    REQUIRE_THAT(back.p_im, WithinAbs(x.p_im, 1e-10));
    REQUIRE_THAT(back.n_re, WithinAbs(x.n_re, 1e-10));
    REQUIRE_THAT(back.n_im, WithinAbs(x.n_im, 1e-10));
  }
}

TEST_CASE("trained operators reproduce the one-step flow on held-out states") {
  TrainingConfig cfg;
  const KoopmanModel model = train_be(cfg);
  const std::vector<std::pair<ControlPoint, Matrix5d>> trained = {
      {{0.0, 0.0}, model.K0},
      {{1.0, 0.0}, model.K0 + model.B_omega},
      {{0.0, 1.0}, model.K0 + model.B_delta[0]},
  };
  std::mt19937_64 rng(5);
  for (const auto& [u, k] : trained) {
    auto omega = [&u](double) { return u.omega; };
    for (int trial = 0; trial < 200; ++trial) {
      const TlsState x = random_state(rng);
      const Vector5d z_pred = k * lift(x);
      const Vector5d z_true = lift(rk4_step(x, 0.0, cfg.dt, omega, u.delta));
      REQUIRE((z_pred - z_true).norm() / z_true.norm() < 1e-8);
    }
  }
}

TEST_CASE("off-node control error shrinks quadratically with the step") {
  // At an untrained drive strength the bilinear combination carries an
  // O(dt^2) defect; halving dt should cut the one-step error ~4x.
  std::vector<double> errs;
  for (const double dt : {0.04, 0.02, 0.01}) {
    TrainingConfig cfg;
    cfg.dt = dt;
    const KoopmanModel model = train_be(cfg);
    const Matrix5d k_mid = model.K0 + 0.5 * model.B_omega + 0.3 * model.B_delta[0];
    auto omega = [](double) { return 0.5; };
    std::mt19937_64 rng(6);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const TlsState x = random_state(rng);
      const Vector5d z_pred = k_mid * lift(x);
      const Vector5d z_true = lift(rk4_step(x, 0.0, dt, omega, 0.3));
      worst = std::max(worst, (z_pred - z_true).norm());
    }
    errs.push_back(worst);
  }
  REQUIRE(errs[0] / errs[1] > std::pow(2.0, 1.8));
  REQUIRE(errs[1] / errs[2] > std::pow(2.0, 1.8));
}

TEST_CASE("detuning bracket selects the two nearest trained nodes") {
  const std::vector<double> nodes = {-1.0, 0.0, 1.0};
  auto br = nearest_two_detunings(-2.0, nodes);
  REQUIRE((br.lower == -1.0 && br.upper == 0.0 && br.a == 0.0));
  REQUIRE((br.lower_index == 0 && br.upper_index == 1));

  br = nearest_two_detunings(-0.5, nodes);
  REQUIRE((br.lower == -1.0 && br.upper == 0.0));
  REQUIRE_THAT(br.a, WithinAbs(0.5, 1e-15));

  br = nearest_two_detunings(0.25, nodes);
  REQUIRE((br.lower == 0.0 && br.upper == 1.0));
  REQUIRE_THAT(br.a, WithinAbs(0.25, 1e-15));

  br = nearest_two_detunings(5.0, nodes);
  REQUIRE((br.lower == 0.0 && br.upper == 1.0 && br.a == 1.0));
  REQUIRE((br.lower_index == 1 && br.upper_index == 2));

  br = nearest_two_detunings(0.0, nodes);
  REQUIRE(br.a == 0.0);
  REQUIRE(br.lower == 0.0);

  const std::vector<double> one = {3.0};
  br = nearest_two_detunings(9.0, one);
  REQUIRE((br.lower == 3.0 && br.upper == 3.0 && br.a == 0.0));

  REQUIRE_THROWS_AS(nearest_two_detunings(0.0, std::vector<double>{}), ConfigError);
}

TEST_CASE("refined-grid model is exact at its trained detunings") {
  TrainingConfig cfg;
  const std::vector<double> nodes = {-2.0, -0.5, 1.0, 3.0};
  const KoopmanModel model = train_berg(cfg, nodes);
  REQUIRE(model.berg_detunings == nodes);
  REQUIRE(model.B_delta.size() == nodes.size());
  std::mt19937_64 rng(7);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Matrix5d k_node = model.K0 + delta_operator(model, nodes[i]);
    auto omega = [](double) { return 0.0; };
    for (int trial = 0; trial < 50; ++trial) {
      const TlsState x = random_state(rng);
      const Vector5d z_pred = k_node * lift(x);
      const Vector5d z_true = lift(rk4_step(x, 0.0, cfg.dt, omega, nodes[i]));
      REQUIRE((z_pred - z_true).norm() / z_true.norm() < 1e-8);
    }
  }
}

TEST_CASE("training is deterministic in the seed") {
  TrainingConfig cfg;
  const KoopmanModel a = train_be(cfg);
  const KoopmanModel b = train_be(cfg);
  REQUIRE(matrix_max_diff(a.K0, b.K0) == 0.0);
  REQUIRE(matrix_max_diff(a.B_omega, b.B_omega) == 0.0);
  REQUIRE(matrix_max_diff(a.B_delta[0], b.B_delta[0]) == 0.0);
  REQUIRE((a.projector - b.projector).cwiseAbs().maxCoeff() == 0.0);

  cfg.seed = 43;
  const KoopmanModel c = train_be(cfg);
  REQUIRE(matrix_max_diff(a.K0, c.K0) > 0.0);
}

TEST_CASE("training rejects invalid configurations") {
  TrainingConfig cfg;
  cfg.n_samples = 4;
  REQUIRE_THROWS_AS(train_be(cfg), ConfigError);

  TrainingConfig ok;
  REQUIRE_THROWS_AS(train_berg(ok, std::vector<double>{1.0}), ConfigError);
  REQUIRE_THROWS_AS(train_berg(ok, std::vector<double>{1.0, 0.5}), ConfigError);
  REQUIRE_THROWS_AS(train_berg(ok, std::vector<double>{0.0, 0.0}), ConfigError);

  TrainingConfig with_points;
  with_points.control_points = {{0.5, 0.5}};
  REQUIRE_THROWS_AS(train_be(with_points), ConfigError);
  REQUIRE_THROWS_AS(train_berg(with_points, std::vector<double>{-1.0, 1.0}),
                    ConfigError);
}

TEST_CASE("model files round trip bit-exactly") {
  TrainingConfig cfg;
  const KoopmanModel be = train_be(cfg);
  const KoopmanModel berg = train_berg(cfg, std::vector<double>{-2.0, 0.0, 2.0});
  int idx = 0;
  for (const KoopmanModel& model : {be, berg}) {
    const auto path = temp_file(idx++ == 0 ? "qecho_model_be.bin" : "qecho_model_berg.bin");
    save_model(model, path);
    const KoopmanModel loaded = load_model(path);
    REQUIRE(loaded.variant == model.variant);
    REQUIRE(loaded.dt == model.dt);
    REQUIRE(loaded.berg_detunings == model.berg_detunings);
    REQUIRE(loaded.B_delta.size() == model.B_delta.size());
    REQUIRE(matrix_max_diff(loaded.K0, model.K0) == 0.0);
    REQUIRE(matrix_max_diff(loaded.B_omega, model.B_omega) == 0.0);
    for (std::size_t i = 0; i < model.B_delta.size(); ++i) {
      REQUIRE(matrix_max_diff(loaded.B_delta[i], model.B_delta[i]) == 0.0);
    }
    REQUIRE((loaded.projector - model.projector).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
  }
}

TEST_CASE("model loader rejects corrupt files") {
  const KoopmanModel model = train_be(TrainingConfig{});
  const auto path = temp_file("qecho_model_corrupt.bin");
  save_model(model, path);

  // trailing garbage
  {
    std::ofstream app(path, std::ios::binary | std::ios::app);
    const char junk[3] = {1, 2, 3};
    app.write(junk, sizeof(junk));
  }
  REQUIRE_THROWS_AS(load_model(path), IoError);

  // bad magic
  save_model(model, path);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.write("XXXXXXXX", 8);
  }
  REQUIRE_THROWS_AS(load_model(path), IoError);

  // truncation
  save_model(model, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  REQUIRE_THROWS_AS(load_model(path), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("surrogate trajectory tracks the integrator at a trained detuning") {
  TrainingConfig cfg;
  const std::vector<double> nodes = {-1.5, 0.0, 1.5};
  const KoopmanModel model = train_berg(cfg, nodes);
  TlsState x0{0.2, -0.1, 0.4, 0.0};
  const TimeGrid tg(0.0, 5.0, cfg.dt);
  const PulseSequence no_drive;
  for (const double delta : nodes) {
    const std::vector<TlsState> pred = predict_trajectory(model, x0, delta, no_drive, tg);
    const std::vector<TlsState> truth =
        rk4_solve(x0, tg, [](double) { return 0.0; }, delta);
    REQUIRE(pred.size() == truth.size());
    for (std::size_t k = 0; k < pred.size(); ++k) {
      REQUIRE_THAT(pred[k].p_re, WithinAbs(truth[k].p_re, 1e-9));
      REQUIRE_THAT(pred[k].p_im, WithinAbs(truth[k].p_im, 1e-9));
      REQUIRE_THAT(pred[k].n_re, WithinAbs(truth[k].n_re, 1e-9));
    }
  }
}

TEST_CASE("surrogate handles a resonant preparation pulse") {
  const KoopmanModel model = train_be(TrainingConfig{});
  PulseSequence seq;
  seq.add({0.0, 2.5, std::numbers::pi / 2.0});
  const TimeGrid tg(-5.0, 25.0, model.dt);
  const std::vector<TlsState> pred =
      predict_trajectory(model, TlsState{}, 0.0, seq, tg);
  REQUIRE_THAT(pred.back().n_re, WithinAbs(0.5, 0.05));
}

TEST_CASE("prediction validates the grid and flags divergence") {
  const KoopmanModel model = train_be(TrainingConfig{});
  const PulseSequence no_drive;
  REQUIRE_THROWS_AS(
      predict_trajectory(model, TlsState{}, 0.0, no_drive, TimeGrid(0.0, 1.0, 0.02)),
      ConfigError);
  REQUIRE_THROWS_AS(
      predict_trajectory(model, TlsState{}, 0.0, no_drive, TimeGrid(0.0, 1.0, 0.03)),
      ConfigError);

  KoopmanModel bad = model;
  bad.K0(1, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    predict_trajectory(bad, TlsState{}, 0.0, no_drive, TimeGrid(0.0, 1.0, model.dt));
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    REQUIRE(e.step() == 1);
  }
}
