#include "selinf/polyhedral.hpp"

#include <cmath>
#include <limits>

#include "selinf/errors.hpp"

namespace selinf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Covariance::Covariance(double sigma2) : isotropic_(true), sigma2_(sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw ValidationError("sigma2 must be positive and finite");
}

Covariance::Covariance(Eigen::MatrixXd full)
    : isotropic_(false), full_(std::move(full)) {
  if (full_.rows() != full_.cols())
    throw ValidationError("covariance matrix must be square");
  if (!full_.isApprox(full_.transpose(), 1e-10))
    throw ValidationError("covariance matrix must be symmetric");
}

Eigen::VectorXd Covariance::apply(const Eigen::VectorXd& v) const {
  if (isotropic_) return sigma2_ * v;
  if (v.size() != full_.rows())
    throw ValidationError("covariance/vector dimension mismatch");
  return full_ * v;
}

ContrastDecomposition decompose(const Eigen::VectorXd& y,
                                const Eigen::VectorXd& eta,
                                const Covariance& Sigma) {
  if (y.size() != eta.size())
    throw ValidationError("decompose: y and eta dimensions differ");
  if (eta.isZero(0.0)) throw ValidationError("decompose: eta must be nonzero");
  const Eigen::VectorXd Sigma_eta = Sigma.apply(eta);
  const double var_eta = eta.dot(Sigma_eta);
  if (!(var_eta > 0.0))
    throw ValidationError(
        "decompose: eta^T Sigma eta must be positive (Sigma not PSD on eta)");
  ContrastDecomposition dec;
  dec.eta = eta;
  dec.c = Sigma_eta / var_eta;
  dec.eta_y = eta.dot(y);
  dec.z = y - dec.c * dec.eta_y;
  dec.var_eta = var_eta;
  return dec;
}

TruncationRegion truncation_limits(const SelectionPolyhedron& poly,
                                   const ContrastDecomposition& dec) {
  if (poly.A.cols() != dec.c.size())
    throw ValidationError("truncation_limits: dimension mismatch");
  const Eigen::VectorXd Ac = poly.A * dec.c;
  const Eigen::VectorXd slack = poly.b - poly.A * dec.z;

  // Relative zero test for (Ac)_j; an exact-zero test would misclassify
  // rounded rows into huge finite bounds.
  const double scale = poly.A.cwiseAbs().maxCoeff() *
                       dec.c.cwiseAbs().maxCoeff();
  const double zero_tol = 1e-11 * scale;

  double v_minus = -kInf;
  double v_plus = kInf;
  double v_zero = kInf;
  for (Eigen::Index j = 0; j < Ac.size(); ++j) {
    if (std::abs(Ac[j]) <= zero_tol) {
      v_zero = std::min(v_zero, slack[j]);
    } else if (Ac[j] > 0.0) {
      v_plus = std::min(v_plus, slack[j] / Ac[j]);
    } else {
      v_minus = std::max(v_minus, slack[j] / Ac[j]);
    }
  }
  if (!(v_minus < v_plus) || v_zero < 0.0) return TruncationRegion::empty_region();
  return TruncationRegion({{v_minus, v_plus}}, v_zero);
}

TruncationRegion union_region(const std::vector<SelectionPolyhedron>& polys,
                              const ContrastDecomposition& dec,
                              double merge_tol) {
  if (polys.empty()) throw ValidationError("union_region: no polyhedra");
  if (merge_tol < 0.0) merge_tol = 1e-12 * std::sqrt(dec.var_eta);
  std::vector<TruncationRegion> regions;
  regions.reserve(polys.size());
  for (const SelectionPolyhedron& poly : polys)
    regions.push_back(truncation_limits(poly, dec));
  TruncationRegion merged = merge_regions(regions, merge_tol);
  if (merged.empty())
    throw InternalError(
        "union_region: every sign pattern produced an empty interval, but the "
        "observed event must contribute");
  if (!merged.contains(dec.eta_y, 1e-9 * std::sqrt(dec.var_eta)))
    throw InternalError("union_region: merged region does not contain eta^T y");
  return merged;
}

}  // namespace selinf
