#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selinf/design.hpp"
#include "selinf/lasso.hpp"
#include "selinf/polyhedral.hpp"

namespace selinf {

enum class Mode { kSign, kModel, kSplit };

std::string to_string(Mode mode);

/// A linear functional eta = (X_M^dagger)^T e_j targeting the best linear
/// coefficient of column j within model M.
struct InferenceTarget {
  std::vector<int> model;
  int coef_index;        // column index in the full design
  Eigen::VectorXd eta;   // length n
  std::string name;
};

struct SelectiveInterval {
  InferenceTarget target;
  double estimate;       // eta^T y
  double lower;
  double upper;
  double level;          // 1 - alpha
  Mode mode;
  double pivot_at_zero;  // two-sided p-value for beta^M_j = 0
  TruncationRegion region;
};

/// A per-coefficient failure that did not abort the other targets.
struct TargetError {
  int coef_index;
  std::string name;
  std::string message;
};

struct InferenceResult {
  bool null_model = false;
  std::vector<int> model;
  std::vector<int> signs;
  double lambda = 0.0;
  double gamma = 0.0;
  double sigma2 = 0.0;
  std::vector<SelectiveInterval> intervals;
  std::vector<TargetError> failures;
  std::vector<std::string> warnings;
  /// data_split_baseline only: row order used for the split, selection half
  /// first (length n; first n/2 entries select, the rest infer).
  std::vector<Eigen::Index> split_order;
};

/// Residual variance of the full model, ||(I - P)y||^2 / (n - p). Requires
/// n > p and full column rank.
double estimate_sigma(const DesignMatrix& X, const Eigen::VectorXd& y);

/// lambda = 2 E||X^T eps||_inf with eps ~ N(0, sigma2 I), estimated over
/// n_draws Monte Carlo draws; deterministic given the seed.
double select_lambda(const DesignMatrix& X, double sigma2, int n_draws,
                     std::uint64_t seed);

struct InferOptions {
  double alpha = 0.1;
  Mode mode = Mode::kSign;
  int sign_cap = 15;  // max |M| for model-conditioned enumeration
  SolverOptions solver;
};

/// End-to-end selective inference: fit the lasso, build the conditioning
/// region per selected coefficient, and invert the truncated-Gaussian pivot
/// into equal-tailed intervals. Per-coefficient numerical failures are
/// recorded without aborting the remaining targets.
InferenceResult infer(const DesignMatrix& X, const Eigen::VectorXd& y,
                      const PenaltySpec& penalty, double sigma2,
                      const InferOptions& opts = InferOptions());

/// The rows of X_M^dagger as inference contrasts, one per selected column.
std::vector<InferenceTarget> make_targets(const DesignMatrix& X,
                                          const std::vector<int>& model);

struct LambdaRule {
  bool expectation_rule = true;  // lambda = 2 E||X^T eps||_inf on the
                                 // selection half; otherwise `value`
  double value = 0.0;
  int n_draws = 1000;
};

/// Data-splitting baseline: select on a random half, then classical
/// known-sigma intervals for the selected coefficients from the other half.
InferenceResult data_split_baseline(const DesignMatrix& X,
                                    const Eigen::VectorXd& y,
                                    const LambdaRule& rule, double sigma2,
                                    double alpha, std::uint64_t seed);

}  // namespace selinf
