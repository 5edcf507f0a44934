#pragma once

#include <Eigen/Dense>

#include "qecho/tls_state.hpp"

namespace qecho {

using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Vector5d = Eigen::Matrix<double, 5, 1>;
using ProjectionMatrix = Eigen::Matrix<double, 4, 5>;

// Observable dictionary: monomials of order <= 1, so the lifted space is the
// constant function plus the four state components.
struct Dictionary {
  static constexpr int order = 1;
  static constexpr int z = 5;
};

inline Vector5d lift(const TlsState& x) {
  Vector5d v;
  v << 1.0, x.p_re, x.p_im, x.n_re, x.n_im;
  return v;
}

inline TlsState project_state(const ProjectionMatrix& projector, const Vector5d& z) {
  const Eigen::Matrix<double, 4, 1> x = projector * z;
  return {x(0), x(1), x(2), x(3)};
}

}  // namespace qecho
