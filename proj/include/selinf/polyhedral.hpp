#pragma once

#include <Eigen/Dense>
#include <vector>

#include "selinf/selection_event.hpp"
#include "selinf/truncated_gaussian.hpp"

namespace selinf {

/// Noise covariance: isotropic sigma^2 I by default, or a full matrix.
class Covariance {
 public:
  explicit Covariance(double sigma2);
  explicit Covariance(Eigen::MatrixXd full);

  bool isotropic() const { return isotropic_; }
  double sigma2() const { return sigma2_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

 private:
  bool isotropic_;
  double sigma2_ = 0.0;
  Eigen::MatrixXd full_;
};

/// Splitting of y into the contrast coordinate eta^T y and the independent
/// remainder z = (I - c eta^T) y, with c = Sigma eta (eta^T Sigma eta)^{-1}.
struct ContrastDecomposition {
  Eigen::VectorXd eta;
  Eigen::VectorXd c;
  Eigen::VectorXd z;
  double eta_y;    // eta^T y
  double var_eta;  // eta^T Sigma eta
};

ContrastDecomposition decompose(const Eigen::VectorXd& y,
                                const Eigen::VectorXd& eta,
                                const Covariance& Sigma);

/// One-polyhedron truncation limits along the contrast direction:
/// V- = max_{(Ac)_j < 0} (b_j - (Az)_j) / (Ac)_j, V+ = the min over positive
/// rows, V0 = min slack of the orthogonal rows. Returns the interval
/// [V-, V+] with v0_slack = V0, or the empty-region marker when V- > V+ or
/// V0 < 0 (the polyhedron misses the line through y along c).
TruncationRegion truncation_limits(const SelectionPolyhedron& poly,
                                   const ContrastDecomposition& dec);

/// Union of per-sign-pattern intervals for one model, empties dropped and
/// adjacent intervals merged (default tolerance 1e-12 scaled by the contrast
/// sd). Throws InternalError if every interval is empty or the union fails
/// to contain eta^T y (the observed event must contribute).
TruncationRegion union_region(const std::vector<SelectionPolyhedron>& polys,
                              const ContrastDecomposition& dec,
                              double merge_tol = -1.0);

}  // namespace selinf
