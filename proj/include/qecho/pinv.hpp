#pragma once

#include <Eigen/Dense>

#include "qecho/errors.hpp"

namespace qecho {

namespace detail {

inline Eigen::MatrixXd pseudoinverse_with_rank(const Eigen::MatrixXd& m,
                                               double rcond, int* rank_out) {
  if (m.size() == 0) throw NumericalError("pseudoinverse: empty matrix");
  if (!(rcond >= 0.0)) throw NumericalError("pseudoinverse: rcond must be non-negative");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("pseudoinverse: SVD did not converge");
  }
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rcond * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      inv(i) = 1.0 / sv(i);
      ++rank;
    }
  }
  if (rank_out != nullptr) *rank_out = rank;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace detail

// Moore-Penrose pseudoinverse via SVD; singular values at or below
// rcond * sigma_max are treated as zero.
inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double rcond = 1e-12) {
  return detail::pseudoinverse_with_rank(m, rcond, nullptr);
}

}  // namespace qecho
