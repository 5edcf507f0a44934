#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qecho/errors.hpp"
#include "qecho/lift.hpp"

namespace qecho {

enum class ModelVariant : std::uint32_t { be = 0, berg = 1 };

// Bilinear surrogate of the one-step flow in lifted space. The step operator
// at control (omega, delta) is assembled as
//   M = K0 + omega * B_omega + B(delta)
// where B(delta) is delta * B_delta[0] for the BE variant and the linear
// interpolation of the two nearest trained detuning operators for BERG.
struct KoopmanModel {
  static constexpr int z = Dictionary::z;

  ModelVariant variant = ModelVariant::be;
  double dt = 0.01;
  Matrix5d K0 = Matrix5d::Zero();
  Matrix5d B_omega = Matrix5d::Zero();
  std::vector<double> berg_detunings;  // empty for BE, ascending for BERG
  std::vector<Matrix5d> B_delta;       // BE: exactly one; BERG: one per detuning
  ProjectionMatrix projector = ProjectionMatrix::Zero();
};

struct DetuningBracket {
  double lower = 0.0;
  double upper = 0.0;
  double a = 0.0;  // interpolation weight of `upper`, in [0, 1]
  std::size_t lower_index = 0;
  std::size_t upper_index = 0;
};

// Bracketing pair for linear interpolation over an ascending detuning grid.
// Grid points return a in {0, 1}; detunings outside the grid clamp to the
// nearest edge pair.
inline DetuningBracket nearest_two_detunings(double delta,
                                             std::span<const double> detunings) {
  const std::size_t n = detunings.size();
  if (n == 0) throw ConfigError("detuning bracket: empty grid");
  if (n == 1) return {detunings[0], detunings[0], 0.0, 0, 0};
  if (delta <= detunings.front()) return {detunings[0], detunings[1], 0.0, 0, 1};
  if (delta >= detunings.back()) {
    return {detunings[n - 2], detunings[n - 1], 1.0, n - 2, n - 1};
  }
  const auto it = std::upper_bound(detunings.begin(), detunings.end(), delta);
  const std::size_t hi = static_cast<std::size_t>(it - detunings.begin());
  const std::size_t lo = hi - 1;
  const double width = detunings[hi] - detunings[lo];
  const double a = width > 0.0 ? (delta - detunings[lo]) / width : 0.0;
  return {detunings[lo], detunings[hi], a, lo, hi};
}

// Detuning contribution to the step operator.
inline Matrix5d delta_operator(const KoopmanModel& model, double delta) {
  if (model.variant == ModelVariant::be) {
    return delta * model.B_delta[0];
  }
  const DetuningBracket br = nearest_two_detunings(delta, model.berg_detunings);
  return (1.0 - br.a) * model.B_delta[br.lower_index] +
         br.a * model.B_delta[br.upper_index];
}

}  // namespace qecho
