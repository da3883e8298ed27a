#include "selinf/design.hpp"

#include <cmath>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

void validate(const Eigen::MatrixXd& values,
              const std::vector<std::string>& names, bool standardized) {
  const Eigen::Index n = values.rows();
  const Eigen::Index p = values.cols();
  if (n < 1 || p < 1) throw ValidationError("design matrix must be at least 1 x 1");
  if (!values.allFinite()) throw ValidationError("design matrix has non-finite entries");
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw ValidationError("column_names size does not match p");
  if (standardized) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double mean = values.col(j).mean();
      if (std::abs(mean) > 1e-8)
        throw ValidationError("standardized flag set but column '" + names[j] +
                              "' has mean " + std::to_string(mean));
      if (n < 2) throw ValidationError("standardized flag requires n >= 2");
      const double sd = std::sqrt(
          (values.col(j).array() - mean).square().sum() / double(n - 1));
      if (std::abs(sd - 1.0) > 1e-8)
        throw ValidationError("standardized flag set but column '" + names[j] +
                              "' has sd " + std::to_string(sd));
    }
  }
}

}  // namespace

DesignMatrix::DesignMatrix(Eigen::MatrixXd values_in,
                           std::vector<std::string> names_in,
                           bool standardized_in)
    : values(std::move(values_in)),
      column_names(std::move(names_in)),
      standardized(standardized_in) {
  validate(values, column_names, standardized);
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd values_in, bool standardized_in) {
  std::vector<std::string> names;
  names.reserve(values_in.cols());
  for (Eigen::Index j = 0; j < values_in.cols(); ++j)
    names.push_back("x" + std::to_string(j + 1));
  values = std::move(values_in);
  column_names = std::move(names);
  standardized = standardized_in;
  validate(values, column_names, standardized);
}

PenaltySpec::PenaltySpec(double lambda_in, double gamma_in)
    : lambda(lambda_in), gamma(gamma_in) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ValidationError("lambda must be finite and nonnegative");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma must be finite and nonnegative");
}

DesignMatrix standardize_unit_norm(const Eigen::MatrixXd& raw,
                                   std::vector<std::string> names) {
  if (!raw.allFinite()) throw ValidationError("design matrix has non-finite entries");
  Eigen::MatrixXd out = raw;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j).array() -= out.col(j).mean();
    const double norm = out.col(j).norm();
    if (norm < 1e-12)
      throw ValidationError("column " + std::to_string(j + 1) +
                            " is constant; cannot standardize");
    out.col(j) /= norm;
  }
  return DesignMatrix(std::move(out), std::move(names), false);
}

Eigen::VectorXd center(const Eigen::VectorXd& y) {
  return y.array() - y.mean();
}

}  // namespace selinf
