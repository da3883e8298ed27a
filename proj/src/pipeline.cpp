#include "selinf/pipeline.hpp"

#include <cmath>

#include "selinf/errors.hpp"
#include "gram.hpp"
#include "selinf/gauss.hpp"
#include "selinf/rng.hpp"

namespace selinf {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kSign: return "sign";
    case Mode::kModel: return "model";
    case Mode::kSplit: return "data-split";
  }
  return "?";
}

double estimate_sigma(const DesignMatrix& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.n();
  const Eigen::Index p = X.p();
  if (y.size() != n) throw ValidationError("estimate_sigma: dimension mismatch");
  if (n <= p)
    throw ValidationError(
        "estimate_sigma requires n > p; supply sigma explicitly when p >= n");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.values);
  if (qr.rank() < p)
    throw DegenerateDesignError("estimate_sigma: X is rank deficient");
  const Eigen::VectorXd fitted = X.values * qr.solve(y);
  return (y - fitted).squaredNorm() / static_cast<double>(n - p);
}

double select_lambda(const DesignMatrix& X, double sigma2, int n_draws,
                     std::uint64_t seed) {
  if (n_draws < 100)
    throw ValidationError("select_lambda requires n_draws >= 100");
  if (!(sigma2 > 0.0)) throw ValidationError("select_lambda: sigma2 must be positive");
  const double sd = std::sqrt(sigma2);
  Rng rng(seed, stream::kLambda);
  Eigen::VectorXd eps(X.n());
  double total = 0.0;
  for (int k = 0; k < n_draws; ++k) {
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = rng.normal(0.0, sd);
    total += (X.values.transpose() * eps).lpNorm<Eigen::Infinity>();
  }
  return 2.0 * total / n_draws;
}

std::vector<InferenceTarget> make_targets(const DesignMatrix& X,
                                          const std::vector<int>& model) {
  Eigen::MatrixXd XM(X.n(), model.size());
  for (std::size_t k = 0; k < model.size(); ++k)
    XM.col(k) = X.values.col(model[k]);
  const Eigen::MatrixXd G = XM.transpose() * XM;
  // (X_M^dagger)^T = X_M (X_M^T X_M)^{-1}; column k is the contrast for the
  // k-th selected coefficient. The target always uses the plain pseudo-inverse
  // regardless of gamma: the estimand belongs to the model, not the penalty.
  const Eigen::MatrixXd pinv_t = XM * detail::checked_gram_inverse(G, "make_targets");
  std::vector<InferenceTarget> targets;
  targets.reserve(model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    InferenceTarget t;
    t.model = model;
    t.coef_index = model[k];
    t.eta = pinv_t.col(k);
    t.name = X.column_names[model[k]];
    targets.push_back(std::move(t));
  }
  return targets;
}

namespace {

/// Clamp an observed contrast value sitting exactly on (or within float
/// noise of) a truncation endpoint slightly into the region.
double clamp_into_region(double x, const TruncationRegion& region,
                         double sd_eta, std::vector<std::string>* warnings) {
  if (region.contains(x) && x > region.lower() && x < region.upper()) {
    // also ensure x is strictly inside some interval, not on an inner edge
    for (const Interval& iv : region.intervals())
      if (x > iv.lo && x < iv.hi) return x;
  }
  const double nudge = 1e-12 * sd_eta;
  for (const Interval& iv : region.intervals()) {
    if (x >= iv.lo - 1e-9 * sd_eta && x <= iv.hi + 1e-9 * sd_eta) {
      const double clamped = std::min(std::max(x, iv.lo + nudge), iv.hi - nudge);
      if (clamped != x && warnings)
        warnings->push_back("eta^T y sits on a truncation endpoint; clamped into the region");
      return clamped;
    }
  }
  throw InternalError("observed eta^T y lies outside the truncation region");
}

}  // namespace

InferenceResult infer(const DesignMatrix& X, const Eigen::VectorXd& y,
                      const PenaltySpec& penalty, double sigma2,
                      const InferOptions& opts) {
  if (penalty.lambda <= 0.0) throw ValidationError("infer requires lambda > 0");
  if (!(sigma2 > 0.0)) throw ValidationError("infer: sigma2 must be positive");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0))
    throw ValidationError("infer: alpha must lie in (0, 1)");

  InferenceResult result;
  result.lambda = penalty.lambda;
  result.gamma = penalty.gamma;
  result.sigma2 = sigma2;

  LassoSolution sol = solve(X, y, penalty, opts.solver);
  result.warnings = sol.warnings;
  if (sol.model.empty()) {
    result.null_model = true;
    return result;
  }
  result.model = sol.model;
  result.signs = sol.signs;

  const int msize = static_cast<int>(sol.model.size());
  if (opts.mode == Mode::kModel && msize > opts.sign_cap)
    throw CapacityError("model-conditioned mode needs 2^" +
                        std::to_string(msize) +
                        " sign patterns, above the cap of " +
                        std::to_string(opts.sign_cap));

  std::vector<SelectionPolyhedron> polys;
  if (opts.mode == Mode::kModel) {
    polys = enumerate_sign_polyhedra(X, sol.model, penalty, opts.sign_cap);
  } else {
    polys.push_back(build_polyhedron(X, sol.model, sol.signs, penalty));
  }
  const SelectionPolyhedron observed =
      opts.mode == Mode::kModel
          ? build_polyhedron(X, sol.model, sol.signs, penalty)
          : polys.front();
  if (!observed.contains(y))
    throw InternalError(
        "observed response violates its own selection polyhedron by " +
        std::to_string(observed.max_violation(y)));

  const Covariance Sigma(sigma2);
  for (const InferenceTarget& target : make_targets(X, sol.model)) {
    try {
      const ContrastDecomposition dec = decompose(y, target.eta, Sigma);
      const double sd_eta = std::sqrt(dec.var_eta);
      TruncationRegion region;
      if (opts.mode == Mode::kModel) {
        region = union_region(polys, dec);
      } else {
        region = truncation_limits(observed, dec);
        if (region.empty() || region.v0_slack() < 0.0)
          throw InternalError(
              "observed sign pattern produced an empty truncation interval");
      }
      const double x = clamp_into_region(dec.eta_y, region, sd_eta,
                                         &result.warnings);
      SelectiveInterval out;
      out.target = target;
      out.estimate = dec.eta_y;
      out.level = 1.0 - opts.alpha;
      out.mode = opts.mode;
      out.region = region;
      out.pivot_at_zero = tn_pivot(x, 0.0, dec.var_eta, region).two_sided;
      std::tie(out.lower, out.upper) =
          tn_interval_bounds(x, dec.var_eta, region, opts.alpha);
      result.intervals.push_back(std::move(out));
    } catch (const Error& err) {
      result.failures.push_back({target.coef_index, target.name, err.what()});
    }
  }
  return result;
}

InferenceResult data_split_baseline(const DesignMatrix& X,
                                    const Eigen::VectorXd& y,
                                    const LambdaRule& rule, double sigma2,
                                    double alpha, std::uint64_t seed) {
  const Eigen::Index n = X.n();
  if (n < 4) throw ValidationError("data_split_baseline requires n >= 4");
  if (y.size() != n) throw ValidationError("data_split_baseline: dimension mismatch");
  if (!(sigma2 > 0.0)) throw ValidationError("sigma2 must be positive");

  // Random half split; Fisher-Yates on the index vector.
  std::vector<Eigen::Index> idx(n);
  for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed, stream::kSplit);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  const Eigen::Index n1 = n / 2;
  const Eigen::Index n2 = n - n1;

  Eigen::MatrixXd X1(n1, X.p()), X2(n2, X.p());
  Eigen::VectorXd y1(n1), y2(n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    X1.row(i) = X.values.row(idx[i]);
    y1[i] = y[idx[i]];
  }
  for (Eigen::Index i = 0; i < n2; ++i) {
    X2.row(i) = X.values.row(idx[n1 + i]);
    y2[i] = y[idx[n1 + i]];
  }
  const DesignMatrix half1(X1, X.column_names);

  double lambda = rule.value;
  if (rule.expectation_rule)
    lambda = select_lambda(half1, sigma2, rule.n_draws, seed);

  InferenceResult result;
  result.lambda = lambda;
  result.sigma2 = sigma2;
  result.split_order = idx;

  LassoSolution sel = solve(half1, y1, PenaltySpec(lambda));
  if (sel.model.empty()) {
    result.null_model = true;
    return result;
  }
  result.model = sel.model;
  result.signs = sel.signs;

  // Classical known-sigma intervals for beta^M on the held-out half.
  Eigen::MatrixXd X2M(n2, sel.model.size());
  for (std::size_t k = 0; k < sel.model.size(); ++k)
    X2M.col(k) = X2.col(sel.model[k]);
  const Eigen::MatrixXd G = X2M.transpose() * X2M;
  const Eigen::MatrixXd Ginv =
      detail::checked_gram_inverse(G, "data_split_baseline inference half");
  const Eigen::VectorXd beta2 = Ginv * (X2M.transpose() * y2);
  const double z = normal_quantile(1.0 - alpha / 2.0);

  for (std::size_t k = 0; k < sel.model.size(); ++k) {
    const double se = std::sqrt(sigma2 * Ginv(k, k));
    SelectiveInterval out;
    out.target.model = sel.model;
    out.target.coef_index = sel.model[k];
    out.target.name = X.column_names[sel.model[k]];
    out.target.eta = X2M * Ginv.col(k);  // contrast in half-2 coordinates
    out.estimate = beta2[k];
    out.lower = beta2[k] - z * se;
    out.upper = beta2[k] + z * se;
    out.level = 1.0 - alpha;
    out.mode = Mode::kSplit;
    out.region = TruncationRegion::whole_line();
    const double zstat = beta2[k] / se;
    out.pivot_at_zero = 2.0 * normal_cdf(-std::abs(zstat));
    result.intervals.push_back(std::move(out));
  }
  return result;
}

}  // namespace selinf
