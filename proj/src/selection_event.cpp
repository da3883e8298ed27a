#include "selinf/selection_event.hpp"

#include <cmath>
#include <ostream>

#include "selinf/errors.hpp"
#include "gram.hpp"

namespace selinf {

namespace {

Eigen::MatrixXd selected_columns(const Eigen::MatrixXd& X,
                                 const std::vector<int>& model) {
  Eigen::MatrixXd XM(X.rows(), model.size());
  for (std::size_t k = 0; k < model.size(); ++k) XM.col(k) = X.col(model[k]);
  return XM;
}

std::vector<int> complement(Eigen::Index p, const std::vector<int>& model) {
  std::vector<bool> in(p, false);
  for (int j : model) in[j] = true;
  std::vector<int> out;
  for (Eigen::Index j = 0; j < p; ++j)
    if (!in[j]) out.push_back(static_cast<int>(j));
  return out;
}

}  // namespace

SelectionPolyhedron build_polyhedron(const DesignMatrix& X,
                                     const std::vector<int>& model,
                                     const std::vector<int>& signs,
                                     const PenaltySpec& penalty) {
  const Eigen::Index n = X.n();
  const Eigen::Index p = X.p();
  const Eigen::Index m = static_cast<Eigen::Index>(model.size());
  if (m < 1)
    throw ValidationError(
        "build_polyhedron: empty model (the null-model event is not a "
        "polyhedron of this form)");
  if (signs.size() != model.size())
    throw ValidationError("build_polyhedron: model/sign size mismatch");
  for (int s : signs)
    if (s != 1 && s != -1)
      throw ValidationError("build_polyhedron: signs must be +1 or -1");
  for (int j : model)
    if (j < 0 || j >= p) throw ValidationError("build_polyhedron: model index out of range");
  if (penalty.lambda <= 0.0)
    throw ValidationError("build_polyhedron requires lambda > 0");

  const Eigen::MatrixXd XM = selected_columns(X.values, model);
  Eigen::MatrixXd G = XM.transpose() * XM;
  G.diagonal().array() += penalty.gamma;
  const Eigen::MatrixXd Ginv = detail::checked_gram_inverse(G, "build_polyhedron");

  Eigen::VectorXd sv(m);
  for (Eigen::Index k = 0; k < m; ++k) sv[k] = signs[k];

  // P_M and (X_M^T)^dagger s, with gamma folded into the inverse Gram.
  const Eigen::MatrixXd GinvXMt = Ginv * XM.transpose();  // m x n
  const Eigen::MatrixXd PM = XM * GinvXMt;                // n x n
  const Eigen::VectorXd pinv_t_s = XM * (Ginv * sv);      // n

  const std::vector<int> inactive = complement(p, model);
  const Eigen::Index mi = static_cast<Eigen::Index>(inactive.size());

  SelectionPolyhedron poly;
  poly.A.resize(2 * mi + m, n);
  poly.b.resize(2 * mi + m);
  poly.row_tags.reserve(2 * mi + m);
  poly.model = model;
  poly.signs = signs;
  poly.penalty = penalty;

  const Eigen::MatrixXd resid_proj = Eigen::MatrixXd::Identity(n, n) - PM;
  for (Eigen::Index r = 0; r < mi; ++r) {
    const Eigen::VectorXd xj = X.values.col(inactive[r]);
    const Eigen::RowVectorXd row = (xj.transpose() * resid_proj) / penalty.lambda;
    const double dot = xj.dot(pinv_t_s);
    poly.A.row(r) = row;
    poly.b[r] = 1.0 - dot;
    poly.row_tags.push_back({RowTag::kInactivePlus, inactive[r]});
    poly.A.row(mi + r) = -row;
    poly.b[mi + r] = 1.0 + dot;
  }
  for (Eigen::Index r = 0; r < mi; ++r)
    poly.row_tags.push_back({RowTag::kInactiveMinus, inactive[r]});

  const Eigen::VectorXd b1 = -penalty.lambda * (sv.asDiagonal() * (Ginv * sv));
  for (Eigen::Index k = 0; k < m; ++k) {
    poly.A.row(2 * mi + k) = -sv[k] * GinvXMt.row(k);
    poly.b[2 * mi + k] = b1[k];
    poly.row_tags.push_back({RowTag::kActive, model[k]});
  }
  return poly;
}

std::vector<SelectionPolyhedron> enumerate_sign_polyhedra(
    const DesignMatrix& X, const std::vector<int>& model,
    const PenaltySpec& penalty, int cap) {
  const std::size_t m = model.size();
  if (static_cast<int>(m) > cap)
    throw CapacityError("sign enumeration over 2^" + std::to_string(m) +
                        " patterns exceeds cap " + std::to_string(cap) +
                        "; use sign-conditioned mode");
  std::vector<SelectionPolyhedron> out;
  out.reserve(std::size_t{1} << m);
  std::vector<int> signs(m);
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    for (std::size_t k = 0; k < m; ++k)
      signs[k] = (mask >> (m - 1 - k)) & 1 ? -1 : 1;
    out.push_back(build_polyhedron(X, model, signs, penalty));
  }
  return out;
}

std::optional<std::pair<std::vector<int>, std::vector<int>>> membership_oracle(
    const DesignMatrix& X, const Eigen::VectorXd& y, const PenaltySpec& penalty,
    const SolverOptions& opts) {
  if (penalty.lambda <= 0.0)
    throw ValidationError("membership_oracle requires lambda > 0");
  LassoSolution sol = solve(X, y, penalty, opts);
  if (sol.model.empty()) return std::nullopt;
  return std::make_pair(sol.model, sol.signs);
}

void dump_csv(const SelectionPolyhedron& poly, std::ostream& os) {
  os << "tag,column";
  for (Eigen::Index c = 0; c < poly.A.cols(); ++c) os << ",a" << (c + 1);
  os << ",b\n";
  for (Eigen::Index r = 0; r < poly.rows(); ++r) {
    const RowTag& tag = poly.row_tags[r];
    os << (tag.kind == RowTag::kActive
               ? "active"
               : tag.kind == RowTag::kInactivePlus ? "inactive+" : "inactive-")
       << "," << tag.column;
    for (Eigen::Index c = 0; c < poly.A.cols(); ++c) os << "," << poly.A(r, c);
    os << "," << poly.b[r] << "\n";
  }
}

}  // namespace selinf
