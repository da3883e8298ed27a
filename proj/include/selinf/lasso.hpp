#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "selinf/design.hpp"

namespace selinf {

struct SolverOptions {
  double coef_tol = 1e-10;      // max coefficient change per sweep
  double kkt_tol = 1e-8;        // infinity norm of the stationarity violation
  int max_sweeps = 100000;
  double active_tol = 1e-6;     // band around |s_i| = 1 for the selected set
  bool record_objective = false;
};

/// Solution of the lasso / elastic-net problem together with its KKT
/// certificate: full subgradient, selected model (equicorrelation set) and
/// sign vector.
struct LassoSolution {
  Eigen::VectorXd beta;
  Eigen::VectorXd subgradient;
  std::vector<int> model;    // ascending column indices with |s_i| ~ 1
  std::vector<int> signs;    // +1 / -1, aligned with `model`
  PenaltySpec penalty;
  double kkt_residual = 0.0;
  int sweeps = 0;
  std::vector<double> objective_trace;  // filled when record_objective is set
  std::vector<std::string> warnings;
};

/// Cyclic coordinate descent with cached Gram columns. Throws
/// ConvergenceError (carrying the last KKT residual) if the tolerances are
/// not met within max_sweeps.
LassoSolution solve(const DesignMatrix& X, const Eigen::VectorXd& y,
                    const PenaltySpec& penalty,
                    const SolverOptions& opts = SolverOptions());

/// Stationarity check for a candidate beta: returns the infinity-norm KKT
/// violation (inactive subgradient entries clipped to [-1, 1]) and the raw
/// subgradient s = (X^T (y - X beta) - gamma beta) / lambda.
std::pair<double, Eigen::VectorXd> kkt_check(const DesignMatrix& X,
                                             const Eigen::VectorXd& y,
                                             const Eigen::VectorXd& beta,
                                             const PenaltySpec& penalty);

/// Equicorrelation set {i : |s_i| >= 1 - active_tol} and its signs, ordered
/// by column index. Throws InconsistentSolutionError if some nonzero
/// coefficient falls outside the band.
std::pair<std::vector<int>, std::vector<int>> extract_model(
    const LassoSolution& sol, double active_tol = 1e-6);

}  // namespace selinf
