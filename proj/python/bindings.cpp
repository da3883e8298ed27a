#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selinf/design.hpp"
#include "selinf/errors.hpp"
#include "selinf/lasso.hpp"
#include "selinf/pipeline.hpp"
#include "selinf/selection_event.hpp"
#include "selinf/simulate.hpp"
#include "selinf/truncated_gaussian.hpp"
#include "selinf/version.hpp"

namespace py = pybind11;
using namespace selinf;

namespace {

TruncationRegion region_from_pairs(
    const std::vector<std::pair<double, double>>& intervals) {
  std::vector<Interval> ivs;
  ivs.reserve(intervals.size());
  for (const auto& [lo, hi] : intervals) ivs.push_back({lo, hi});
  return TruncationRegion(ivs);
}

std::vector<std::pair<double, double>> region_to_pairs(
    const TruncationRegion& region) {
  std::vector<std::pair<double, double>> out;
  for (const Interval& iv : region.intervals()) out.emplace_back(iv.lo, iv.hi);
  return out;
}

DesignMatrix design_from(const Eigen::MatrixXd& X,
                         const std::vector<std::string>& names) {
  if (names.empty()) return DesignMatrix(X);
  return DesignMatrix(X, names);
}

Mode mode_from(const std::string& mode) {
  if (mode == "sign") return Mode::kSign;
  if (mode == "model") return Mode::kModel;
  throw ValidationError("mode must be 'sign' or 'model'");
}

py::dict solution_to_dict(const LassoSolution& sol) {
  py::dict out;
  out["beta"] = sol.beta;
  out["subgradient"] = sol.subgradient;
  out["model"] = sol.model;
  out["signs"] = sol.signs;
  out["kkt_residual"] = sol.kkt_residual;
  out["sweeps"] = sol.sweeps;
  out["warnings"] = sol.warnings;
  return out;
}

py::dict result_to_dict(const InferenceResult& res,
                        const std::vector<std::string>& names) {
  py::dict out;
  out["null_model"] = res.null_model;
  py::list model_names;
  for (int j : res.model) model_names.append(names[j]);
  out["model"] = res.model;
  out["model_names"] = model_names;
  out["signs"] = res.signs;
  out["lambda"] = res.lambda;
  out["gamma"] = res.gamma;
  out["sigma2"] = res.sigma2;
  py::list intervals;
  for (const SelectiveInterval& iv : res.intervals) {
    py::dict d;
    d["name"] = iv.target.name;
    d["coef_index"] = iv.target.coef_index;
    d["estimate"] = iv.estimate;
    d["lower"] = iv.lower;
    d["upper"] = iv.upper;
    d["level"] = iv.level;
    d["mode"] = to_string(iv.mode);
    d["p_value"] = iv.pivot_at_zero;
    d["region"] = region_to_pairs(iv.region);
    intervals.append(std::move(d));
  }
  out["intervals"] = intervals;
  py::list failures;
  for (const TargetError& f : res.failures) {
    py::dict d;
    d["name"] = f.name;
    d["error"] = f.message;
    failures.append(std::move(d));
  }
  out["failures"] = failures;
  out["warnings"] = res.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_selinf, m) {
  m.doc() = "Exact post-selection inference for lasso-selected linear models";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "SelinfError", PyExc_RuntimeError);

  m.def(
      "solve_lasso",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam,
         double gamma, const std::vector<std::string>& names) {
        return solution_to_dict(
            solve(design_from(X, names), y, PenaltySpec(lam, gamma)));
      },
      py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("gamma") = 0.0,
      py::arg("names") = std::vector<std::string>{},
      "Solve the lasso / elastic net by coordinate descent; returns the "
      "solution with its KKT certificate and selected model.");

  m.def(
      "kkt_check",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
         const Eigen::VectorXd& beta, double lam, double gamma) {
        return kkt_check(DesignMatrix(X), y, beta, PenaltySpec(lam, gamma));
      },
      py::arg("X"), py::arg("y"), py::arg("beta"), py::arg("lam"),
      py::arg("gamma") = 0.0,
      "Stationarity violation and recovered subgradient for a candidate "
      "coefficient vector.");

  m.def(
      "build_polyhedron",
      [](const Eigen::MatrixXd& X, const std::vector<int>& model,
         const std::vector<int>& signs, double lam, double gamma) {
        const SelectionPolyhedron poly =
            build_polyhedron(DesignMatrix(X), model, signs,
                             PenaltySpec(lam, gamma));
        return py::make_tuple(poly.A, poly.b);
      },
      py::arg("X"), py::arg("model"), py::arg("signs"), py::arg("lam"),
      py::arg("gamma") = 0.0,
      "Affine representation (A, b) of the selection event {A y <= b}.");

  m.def(
      "tn_cdf",
      [](double x, double mu, double sigma2,
         const std::vector<std::pair<double, double>>& region) {
        return tn_cdf(x, mu, sigma2, region_from_pairs(region));
      },
      py::arg("x"), py::arg("mu"), py::arg("sigma2"), py::arg("region"),
      "CDF of N(mu, sigma2) truncated to a union of disjoint intervals.");

  m.def(
      "tn_pivot",
      [](double x, double mu0, double sigma2,
         const std::vector<std::pair<double, double>>& region) {
        const PivotPair p = tn_pivot(x, mu0, sigma2, region_from_pairs(region));
        return py::make_tuple(p.left, p.two_sided);
      },
      py::arg("x"), py::arg("mu0"), py::arg("sigma2"), py::arg("region"),
      "Left and two-sided truncated-Gaussian pivots at a hypothesized mean.");

  m.def(
      "tn_interval_bounds",
      [](double x, double sigma2,
         const std::vector<std::pair<double, double>>& region, double alpha) {
        return tn_interval_bounds(x, sigma2, region_from_pairs(region), alpha);
      },
      py::arg("x"), py::arg("sigma2"), py::arg("region"), py::arg("alpha"),
      "Equal-tailed (1 - alpha) interval from inverting the truncated pivot.");

  m.def(
      "estimate_sigma",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        return estimate_sigma(DesignMatrix(X), y);
      },
      py::arg("X"), py::arg("y"),
      "Residual variance of the full model (requires n > p).");

  m.def(
      "select_lambda",
      [](const Eigen::MatrixXd& X, double sigma2, int n_draws,
         std::uint64_t seed) {
        return select_lambda(DesignMatrix(X), sigma2, n_draws, seed);
      },
      py::arg("X"), py::arg("sigma2"), py::arg("n_draws") = 10000,
      py::arg("seed") = 1,
      "lambda = 2 E||X^T eps||_inf with eps ~ N(0, sigma2 I).");

  m.def(
      "infer",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam,
         double sigma2, double alpha, const std::string& mode, double gamma,
         const std::vector<std::string>& names) {
        const DesignMatrix design = design_from(X, names);
        InferOptions opts;
        opts.alpha = alpha;
        opts.mode = mode_from(mode);
        const InferenceResult res =
            infer(design, y, PenaltySpec(lam, gamma), sigma2, opts);
        return result_to_dict(res, design.column_names);
      },
      py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("sigma2"),
      py::arg("alpha") = 0.1, py::arg("mode") = "sign", py::arg("gamma") = 0.0,
      py::arg("names") = std::vector<std::string>{},
      "Selective confidence intervals and p-values for every lasso-selected "
      "coefficient.");

  m.def(
      "data_split_baseline",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double sigma2,
         double alpha, std::uint64_t seed, py::object lam,
         const std::vector<std::string>& names) {
        const DesignMatrix design = design_from(X, names);
        LambdaRule rule;
        if (!lam.is_none()) {
          rule.expectation_rule = false;
          rule.value = lam.cast<double>();
        }
        const InferenceResult res =
            data_split_baseline(design, y, rule, sigma2, alpha, seed);
        return result_to_dict(res, design.column_names);
      },
      py::arg("X"), py::arg("y"), py::arg("sigma2"), py::arg("alpha") = 0.1,
      py::arg("seed") = 1, py::arg("lam") = py::none(),
      py::arg("names") = std::vector<std::string>{},
      "Data-splitting baseline: select on one half, classical intervals on "
      "the other.");

  m.def(
      "run_coverage",
      [](int n, int p, const Eigen::VectorXd& true_beta, double sigma,
         py::object lam, double alpha, int replications,
         const std::string& mode, std::uint64_t seed) {
        ExperimentConfig config;
        config.n = n;
        config.p = p;
        config.true_beta = true_beta;
        config.sigma = sigma;
        if (!lam.is_none()) {
          config.lambda_auto = false;
          config.lambda_value = lam.cast<double>();
        }
        config.alpha = alpha;
        config.replications = replications;
        config.mode = mode_from(mode);
        config.seed = seed;
        const CoverageReport report = run_coverage(config);
        py::dict out;
        out["lambda"] = report.lambda;
        out["coverage"] = report.overall.coverage;
        out["coverage_se"] = report.overall.coverage_se;
        out["intervals"] = report.overall.intervals;
        out["fcr"] = report.fcr;
        out["pfcr"] = report.pfcr;
        out["selection_rate"] = report.selection_rate;
        out["null_model_frequency"] = report.null_model_frequency;
        out["ks_statistic"] = report.ks.statistic;
        out["ks_p_value"] = report.ks.p_value;
        out["mean_width"] = report.overall.mean_width;
        out["valid"] = report.valid;
        return out;
      },
      py::arg("n"), py::arg("p"), py::arg("true_beta"), py::arg("sigma") = 1.0,
      py::arg("lam") = py::none(), py::arg("alpha") = 0.1,
      py::arg("replications") = 1000, py::arg("mode") = "sign",
      py::arg("seed") = 1,
      "Monte Carlo conditional-coverage experiment; lam=None uses the "
      "expectation rule.");
}
