#pragma once

#include <Eigen/Dense>
#include <string>

#include "selinf/errors.hpp"

namespace selinf::detail {

inline constexpr double kMaxGramCondition = 1e10;

/// Inverse of a symmetric PSD Gram matrix, rejecting condition numbers at or
/// above 1e10.
inline Eigen::MatrixXd checked_gram_inverse(const Eigen::MatrixXd& G,
                                            const char* context) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const double emin = eig.eigenvalues().minCoeff();
  const double emax = eig.eigenvalues().maxCoeff();
  if (!(emin > 0.0) || emax / emin >= kMaxGramCondition)
    throw DegenerateDesignError(
        std::string(context) + ": selected Gram matrix is ill-conditioned" +
        (emin > 0.0 ? " (condition number " + std::to_string(emax / emin) + ")"
                    : " (singular)"));
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace selinf::detail
