#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "selinf/design.hpp"
#include "selinf/errors.hpp"
#include "selinf/lasso.hpp"
#include "selinf/pipeline.hpp"
#include "selinf/rng.hpp"

using namespace selinf;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int n, int p) {
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  return X;
}

Eigen::VectorXd random_vector(Rng& rng, int n) {
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.normal();
  return y;
}

double objective(const DesignMatrix& X, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& beta, const PenaltySpec& pen) {
  return 0.5 * (y - X.values * beta).squaredNorm() +
         pen.lambda * beta.lpNorm<1>() + 0.5 * pen.gamma * beta.squaredNorm();
}

}  // namespace

TEST_SUITE_BEGIN("lasso");

TEST_CASE("design and penalty validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, std::nan(""), 0.0;
  CHECK_THROWS_AS(DesignMatrix{bad}, ValidationError);
  CHECK_THROWS_AS(DesignMatrix(Eigen::MatrixXd::Identity(2, 2),
                               std::vector<std::string>{"only_one"}),
                  ValidationError);

  // the standardized flag demands mean 0 and sample sd 1 per column
  Eigen::MatrixXd centered(4, 1);
  centered << -1.5, -0.5, 0.5, 1.5;
  Eigen::MatrixXd unit = centered / std::sqrt(centered.squaredNorm() / 3.0);
  CHECK_NOTHROW(DesignMatrix(unit, true));
  CHECK_THROWS_AS(DesignMatrix(centered * 2.0, true), ValidationError);
  CHECK_THROWS_AS(DesignMatrix(Eigen::MatrixXd::Ones(4, 1), true),
                  ValidationError);

  CHECK_THROWS_AS(PenaltySpec(-1.0), ValidationError);
  CHECK_THROWS_AS(PenaltySpec(1.0, -0.5), ValidationError);

  // unit-norm standardization: centered columns, norm 1, centered response
  Rng rng(49, 0);
  const Eigen::MatrixXd raw = random_matrix(rng, 9, 3).array() + 4.0;
  const DesignMatrix std_X = standardize_unit_norm(raw, {"a", "b", "c"});
  for (int j = 0; j < 3; ++j) {
    CHECK(std_X.values.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std_X.values.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_FALSE(std_X.standardized);
}

TEST_CASE("identity design reduces to soft thresholding") {
  const DesignMatrix X(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd y(2);
  y << 3.0, 0.5;

  LassoSolution plain = solve(X, y, PenaltySpec(1.0));
  CHECK(plain.beta[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(plain.beta[1] == 0.0);
  CHECK(plain.model == std::vector<int>{0});
  CHECK(plain.signs == std::vector<int>{1});

  LassoSolution enet = solve(X, y, PenaltySpec(1.0, 1.0));
  CHECK(enet.beta[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(enet.beta[1] == 0.0);
}

TEST_CASE("random instance satisfies the KKT oracle") {
  Rng rng(101, 0);
  const DesignMatrix X(random_matrix(rng, 10, 5));
  const Eigen::VectorXd y = random_vector(rng, 10);
  const double lambda =
      0.5 * (X.values.transpose() * y).lpNorm<Eigen::Infinity>();
  const LassoSolution sol = solve(X, y, PenaltySpec(lambda));
  const auto [residual, s] = kkt_check(X, y, sol.beta, PenaltySpec(lambda));
  CHECK(residual <= 1e-6);
  // raw recovered subgradient sits within residual/lambda of the certificate
  CHECK((s - sol.subgradient).lpNorm<Eigen::Infinity>() <= residual / lambda + 1e-15);
}

TEST_CASE("kkt_check anchors") {
  Rng rng(102, 0);
  const DesignMatrix X(random_matrix(rng, 8, 4));
  const Eigen::VectorXd y = random_vector(rng, 8);
  const double lmax = (X.values.transpose() * y).lpNorm<Eigen::Infinity>();

  SUBCASE("zero is optimal once lambda dominates") {
    const auto [residual, s] =
        kkt_check(X, y, Eigen::VectorXd::Zero(4), PenaltySpec(lmax * 1.01));
    CHECK(residual == 0.0);
    CHECK(s.lpNorm<Eigen::Infinity>() < 1.0);
  }
  SUBCASE("solver output passes, perturbed output fails") {
    const PenaltySpec pen(0.4 * lmax);
    LassoSolution sol = solve(X, y, pen);
    CHECK(kkt_check(X, y, sol.beta, pen).first <= 1e-6);
    Eigen::VectorXd bad = sol.beta;
    bad[0] += 0.1;
    CHECK(kkt_check(X, y, bad, pen).first > 1e-3);
  }
  SUBCASE("lambda = 0 is unsupported") {
    CHECK_THROWS_AS(kkt_check(X, y, Eigen::VectorXd::Zero(4), PenaltySpec(0.0)),
                    ValidationError);
  }
}

TEST_CASE("extract_model") {
  const DesignMatrix X(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd y(2);
  y << 3.0, 0.5;
  LassoSolution sol = solve(X, y, PenaltySpec(1.0));
  auto [model, signs] = extract_model(sol, 1e-6);
  CHECK(model == std::vector<int>{0});
  CHECK(signs == std::vector<int>{1});

  // null model once lambda dominates
  LassoSolution null_sol = solve(X, y, PenaltySpec(3.5));
  CHECK(null_sol.model.empty());

  // tampered solution is rejected
  sol.subgradient[0] = 0.2;
  CHECK_THROWS_AS(extract_model(sol, 1e-6), InconsistentSolutionError);
}

TEST_CASE("strong signals are recovered with high frequency" *
          doctest::timeout(120)) {
  // n=25, p=50, 5 strong true coefficients
  Rng design_rng(7272, 0);
  const DesignMatrix X(random_matrix(design_rng, 25, 50));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(50);
  for (int j = 0; j < 5; ++j) beta[j] = 5.0;
  const Eigen::VectorXd mu = X.values * beta;
  const double lambda = select_lambda(X, 1.0, 2000, 7272);
  int hits = 0;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    Rng rng(7272, 1, r);
    Eigen::VectorXd y = mu;
    for (int i = 0; i < 25; ++i) y[i] += rng.normal();
    const LassoSolution sol = solve(X, y, PenaltySpec(lambda));
    if (sol.model.size() >= 5) ++hits;
  }
  CHECK(static_cast<double>(hits) / reps > 0.9);
}

TEST_CASE("soft-threshold equivalence on orthonormal designs") {
  Rng rng(55, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 12, p = 6;
    Eigen::MatrixXd raw = random_matrix(rng, n, p);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd Q =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    const DesignMatrix X(Q);
    const Eigen::VectorXd y = random_vector(rng, n);
    const Eigen::VectorXd xty = Q.transpose() * y;
    const double lambda = 0.3 * xty.lpNorm<Eigen::Infinity>();
    const double gamma = rep % 2 == 0 ? 0.0 : 0.7;
    const LassoSolution sol = solve(X, y, PenaltySpec(lambda, gamma));
    for (int j = 0; j < p; ++j) {
      const double st =
          std::copysign(std::max(std::abs(xty[j]) - lambda, 0.0), xty[j]) /
          (1.0 + gamma);
      CHECK(sol.beta[j] == doctest::Approx(st).epsilon(1e-8));
    }
  }
}

TEST_CASE("objective sequence is non-increasing") {
  Rng rng(56, 0);
  const DesignMatrix X(random_matrix(rng, 30, 12));
  const Eigen::VectorXd y = random_vector(rng, 30);
  SolverOptions opts;
  opts.record_objective = true;
  const LassoSolution sol = solve(
      X, y,
      PenaltySpec(0.2 * (X.values.transpose() * y).lpNorm<Eigen::Infinity>()),
      opts);
  REQUIRE(sol.objective_trace.size() > 1);
  for (std::size_t k = 1; k < sol.objective_trace.size(); ++k)
    CHECK(sol.objective_trace[k] <= sol.objective_trace[k - 1] + 1e-10);
}

TEST_CASE("lambda path extremes") {
  Rng rng(57, 0);
  const DesignMatrix X(random_matrix(rng, 20, 6));
  const Eigen::VectorXd y = random_vector(rng, 20);
  const double lmax = (X.values.transpose() * y).lpNorm<Eigen::Infinity>();

  const LassoSolution at_max = solve(X, y, PenaltySpec(lmax * (1.0 + 1e-12)));
  CHECK(at_max.beta.isZero(0.0));

  const LassoSolution tiny = solve(X, y, PenaltySpec(1e-8 * lmax));
  const Eigen::VectorXd ols = X.values.colPivHouseholderQr().solve(y);
  CHECK((tiny.beta - ols).norm() / ols.norm() < 1e-4);
}

TEST_CASE("solution objective beats zero") {
  Rng rng(58, 0);
  const DesignMatrix X(random_matrix(rng, 15, 8));
  const Eigen::VectorXd y = random_vector(rng, 15);
  const PenaltySpec pen(
      0.4 * (X.values.transpose() * y).lpNorm<Eigen::Infinity>(), 0.3);
  const LassoSolution sol = solve(X, y, pen);
  CHECK(objective(X, y, sol.beta, pen) <=
        objective(X, y, Eigen::VectorXd::Zero(8), pen) + 1e-12);
}

TEST_CASE("input validation and failure reporting") {
  const DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd bad(3);
  bad << 1.0, std::nan(""), 0.0;
  CHECK_THROWS_AS(solve(X, bad, PenaltySpec(1.0)), ValidationError);

  // starved iteration budget surfaces as ConvergenceError with a residual
  Rng rng(59, 0);
  const DesignMatrix wide(random_matrix(rng, 20, 30));
  const Eigen::VectorXd y = random_vector(rng, 20);
  SolverOptions opts;
  opts.max_sweeps = 1;
  try {
    solve(wide, y,
          PenaltySpec(0.01 * (wide.values.transpose() * y)
                                 .lpNorm<Eigen::Infinity>()),
          opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.kkt_residual));
  }
}

TEST_SUITE_END();
