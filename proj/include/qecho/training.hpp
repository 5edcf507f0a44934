#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qecho/errors.hpp"
#include "qecho/lift.hpp"
#include "qecho/model.hpp"
#include "qecho/pinv.hpp"
#include "qecho/rk4.hpp"

namespace qecho {

struct ControlPoint {
  double omega = 0.0;
  double delta = 0.0;
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

struct TrainingConfig {
  int n_samples = 100;
  std::array<Interval, 4> sample_box{};  // per state component
  double dt = 0.01;
  std::uint64_t seed = 42;
  std::vector<ControlPoint> control_points;
};

// Seeded uniform sampling with an explicit 53-bit mantissa mapping, so the
// stream does not depend on the standard library's distribution details.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

// Snapshot states, their lifted images, and the shared least-squares
// factors reused by every control point of one model.
struct SnapshotBasis {
  Eigen::Matrix<double, 4, Eigen::Dynamic> states;
  Eigen::Matrix<double, 5, Eigen::Dynamic> lifted;
  Eigen::MatrixXd lifted_pinv;  // n x z
  ProjectionMatrix projector;   // maps lifted coordinates back to the state
};

inline void validate_training_config(const TrainingConfig& cfg) {
  if (cfg.n_samples < Dictionary::z) {
    throw ConfigError("training: n_samples must be at least the lifted dimension (5)");
  }
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw ConfigError("training: dt must be positive and finite");
  }
  for (const Interval& box : cfg.sample_box) {
    if (!(box.lo < box.hi) || !std::isfinite(box.lo) || !std::isfinite(box.hi)) {
      throw ConfigError("training: sample box intervals must be finite with lo < hi");
    }
  }
}

inline SnapshotBasis make_snapshot_basis(const TrainingConfig& cfg) {
  validate_training_config(cfg);
  const int n = cfg.n_samples;
  SnapshotBasis basis;
  basis.states.resize(4, n);
  SampleRng rng(cfg.seed);
  for (int j = 0; j < n; ++j) {
    for (int comp = 0; comp < 4; ++comp) {
      basis.states(comp, j) =
          rng.uniform(cfg.sample_box[static_cast<std::size_t>(comp)].lo,
                      cfg.sample_box[static_cast<std::size_t>(comp)].hi);
    }
  }
  basis.lifted.resize(5, n);
  basis.lifted.row(0).setOnes();
  basis.lifted.bottomRows(4) = basis.states;

  int rank = 0;
  basis.lifted_pinv = detail::pseudoinverse_with_rank(basis.lifted, 1e-12, &rank);
  if (rank < Dictionary::z) {
    throw NumericalError("training: lifted snapshots are rank-deficient");
  }
  basis.projector = basis.states * basis.lifted_pinv;
  return basis;
}

// One-step flow map at constant control, restricted to the dictionary span:
// K = lift(flow(X)) * pinv(lift(X)).
inline Matrix5d train_operator_on_basis(const ControlPoint& u,
                                        const SnapshotBasis& basis, double dt) {
  const Eigen::Index n = basis.states.cols();
  Eigen::Matrix<double, 5, Eigen::Dynamic> lifted_next(5, n);
  auto omega = [&u](double) { return u.omega; };
  for (Eigen::Index j = 0; j < n; ++j) {
    const TlsState x{basis.states(0, j), basis.states(1, j), basis.states(2, j),
                     basis.states(3, j)};
    lifted_next.col(j) = lift(rk4_step(x, 0.0, dt, omega, u.delta));
  }
  const Matrix5d k = lifted_next * basis.lifted_pinv;
  if (!k.allFinite()) {
    throw NumericalError("training: operator has non-finite entries");
  }
  return k;
}

}  // namespace detail

// Finite-time lifted operator for a single constant control.
inline Matrix5d train_operator(const ControlPoint& u, const TrainingConfig& cfg) {
  return detail::train_operator_on_basis(u, detail::make_snapshot_basis(cfg), cfg.dt);
}

// Bilinear model from the zero control plus the two unit control vectors.
// cfg.control_points may be empty (the unit vectors are implied) or must list
// exactly [1,0] and [0,1].
inline KoopmanModel train_be(const TrainingConfig& cfg) {
  if (!cfg.control_points.empty()) {
    const bool ok = cfg.control_points.size() == 2 &&
                    cfg.control_points[0].omega == 1.0 &&
                    cfg.control_points[0].delta == 0.0 &&
                    cfg.control_points[1].omega == 0.0 &&
                    cfg.control_points[1].delta == 1.0;
    if (!ok) {
      throw ConfigError("train_be: control points must be the unit vectors [1,0], [0,1]");
    }
  }
  const detail::SnapshotBasis basis = detail::make_snapshot_basis(cfg);
  const Matrix5d k0 = detail::train_operator_on_basis({0.0, 0.0}, basis, cfg.dt);
  const Matrix5d k_omega = detail::train_operator_on_basis({1.0, 0.0}, basis, cfg.dt);
  const Matrix5d k_delta = detail::train_operator_on_basis({0.0, 1.0}, basis, cfg.dt);

  KoopmanModel model;
  model.variant = ModelVariant::be;
  model.dt = cfg.dt;
  model.K0 = k0;
  model.B_omega = k_omega - k0;
  model.B_delta = {k_delta - k0};
  model.projector = basis.projector;
  return model;
}

// Bilinear model with a refined detuning grid: the unit-omega difference
// operator plus one difference operator per trained detuning.
inline KoopmanModel train_berg(const TrainingConfig& cfg,
                               std::span<const double> train_detunings) {
  if (!cfg.control_points.empty()) {
    throw ConfigError("train_berg: control points are derived from the detuning grid");
  }
  if (train_detunings.size() < 2) {
    throw ConfigError("train_berg: need at least two training detunings");
  }
  for (std::size_t i = 0; i < train_detunings.size(); ++i) {
    if (!std::isfinite(train_detunings[i])) {
      throw ConfigError("train_berg: training detunings must be finite");
    }
    if (i > 0 && !(train_detunings[i] > train_detunings[i - 1])) {
      throw ConfigError("train_berg: training detunings must be strictly increasing");
    }
  }
  const detail::SnapshotBasis basis = detail::make_snapshot_basis(cfg);
  const Matrix5d k0 = detail::train_operator_on_basis({0.0, 0.0}, basis, cfg.dt);
  const Matrix5d k_omega = detail::train_operator_on_basis({1.0, 0.0}, basis, cfg.dt);

  KoopmanModel model;
  model.variant = ModelVariant::berg;
  model.dt = cfg.dt;
  model.K0 = k0;
  model.B_omega = k_omega - k0;
  model.berg_detunings.assign(train_detunings.begin(), train_detunings.end());
  model.B_delta.reserve(train_detunings.size());
  for (const double delta : train_detunings) {
    model.B_delta.push_back(
        detail::train_operator_on_basis({0.0, delta}, basis, cfg.dt) - k0);
  }
  model.projector = basis.projector;
  return model;
}

}  // namespace qecho
