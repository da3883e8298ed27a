#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "selinf/design.hpp"
#include "selinf/lasso.hpp"

namespace selinf {

/// Which constraint a polyhedron row encodes, and for which column.
struct RowTag {
  enum Kind { kInactivePlus, kInactiveMinus, kActive };
  Kind kind;
  int column;
};

/// The affine representation {A y <= b} of the event "the lasso selects model
/// M with signs s". Rows are ordered inactive+ block, inactive- block, then
/// one active row per selected variable.
struct SelectionPolyhedron {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<RowTag> row_tags;
  std::vector<int> model;
  std::vector<int> signs;
  PenaltySpec penalty;

  Eigen::Index rows() const { return A.rows(); }

  /// Max row violation of A y <= b (negative means strictly inside).
  double max_violation(const Eigen::VectorXd& y) const {
    return (A * y - b).maxCoeff();
  }
  bool contains(const Eigen::VectorXd& y, double tol = 1e-9) const {
    return max_violation(y) <= tol;
  }
};

/// Build the selection polyhedron for (M, s). With gamma > 0 every inverse
/// Gram is replaced by (X_M^T X_M + gamma I)^{-1}, including inside the
/// projector and the pseudo-inverse. Requires |M| >= 1 and a selected Gram
/// with condition number below 1e10.
SelectionPolyhedron build_polyhedron(const DesignMatrix& X,
                                     const std::vector<int>& model,
                                     const std::vector<int>& signs,
                                     const PenaltySpec& penalty);

/// One polyhedron per sign pattern s in {-1,+1}^|M|, in lexicographic order
/// (all +1 first coordinate flips fastest last). Infeasible patterns are
/// kept; they yield empty truncation intervals downstream.
std::vector<SelectionPolyhedron> enumerate_sign_polyhedra(
    const DesignMatrix& X, const std::vector<int>& model,
    const PenaltySpec& penalty, int cap = 15);

/// Runs the solver at y and reports the selected (model, signs), or
/// std::nullopt for the null model. This is the ground truth the polyhedra
/// are checked against.
std::optional<std::pair<std::vector<int>, std::vector<int>>> membership_oracle(
    const DesignMatrix& X, const Eigen::VectorXd& y, const PenaltySpec& penalty,
    const SolverOptions& opts = SolverOptions());

/// Debug dump of (A, b, row_tags) as CSV.
void dump_csv(const SelectionPolyhedron& poly, std::ostream& os);

}  // namespace selinf
