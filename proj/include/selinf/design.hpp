#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace selinf {

/// Fixed n x p predictor matrix with column labels. When `standardized` is
/// set, construction checks every column for mean 0 and sample standard
/// deviation 1 (both to 1e-8).
struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;
  bool standardized = false;

  DesignMatrix() = default;
  DesignMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names,
               bool standardized = false);

  /// Unlabeled convenience constructor; names become x1..xp.
  explicit DesignMatrix(Eigen::MatrixXd values, bool standardized = false);

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }
};

/// l1 weight lambda and optional l2 weight gamma (0 for the plain lasso).
struct PenaltySpec {
  double lambda = 0.0;
  double gamma = 0.0;

  PenaltySpec() = default;
  PenaltySpec(double lambda, double gamma = 0.0);
};

/// Center columns and scale each to unit Euclidean norm. This is the
/// standardization the lambda-expectation rule assumes; note it does not
/// produce unit-variance columns, so the resulting DesignMatrix does not set
/// the `standardized` flag.
DesignMatrix standardize_unit_norm(const Eigen::MatrixXd& raw,
                                   std::vector<std::string> names);

/// Center a response vector.
Eigen::VectorXd center(const Eigen::VectorXd& y);

}  // namespace selinf
