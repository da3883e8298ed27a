#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>

#include "selinf/errors.hpp"
#include "selinf/io.hpp"
#include "selinf/pipeline.hpp"
#include "selinf/simulate.hpp"
#include "selinf/truncated_gaussian.hpp"
#include "selinf/version.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kNumericalError = 3;
constexpr int kNullModel = 4;

struct InferArgs {
  std::string data;
  std::string response;
  bool standardize = false;
  std::string lambda = "auto";
  double gamma = 0.0;
  double sigma = -1.0;  // <0: estimate from the full model
  double alpha = 0.1;
  std::string mode = "sign";
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "both";
  int lambda_draws = 10000;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void write_outputs(const fs::path& dir, const std::string& stem,
                   const json& j, const std::string& csv,
                   const std::string& format) {
  fs::create_directories(dir);
  if (format == "json" || format == "both")
    selinf::atomic_write(dir / (stem + ".json"), j.dump(2) + "\n");
  if (format == "csv" || format == "both")
    selinf::atomic_write(dir / (stem + ".csv"), csv);
}

int cmd_infer(const InferArgs& args) {
  Timer timer;
  const selinf::CsvTable table = selinf::read_csv(args.data);

  int response_col = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == args.response) response_col = static_cast<int>(c);
  if (response_col < 0)
    throw selinf::ValidationError("response column '" + args.response +
                                  "' not found in " + args.data);
  if (table.header.size() < 2)
    throw selinf::ValidationError("need at least one predictor column");

  const Eigen::Index n = table.values.rows();
  const Eigen::Index p = static_cast<Eigen::Index>(table.header.size()) - 1;
  Eigen::MatrixXd raw(n, p);
  std::vector<std::string> names;
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
    if (c == response_col) continue;
    raw.col(k) = table.values.col(c);
    names.push_back(table.header[c]);
    ++k;
  }
  Eigen::VectorXd y = table.values.col(response_col);

  selinf::DesignMatrix X =
      args.standardize ? selinf::standardize_unit_norm(raw, names)
                       : selinf::DesignMatrix(raw, names);
  if (args.standardize) y = selinf::center(y);

  selinf::RunManifest manifest;
  manifest.command = "infer";
  manifest.data_path = args.data;
  manifest.response = args.response;
  manifest.standardize = args.standardize;
  manifest.gamma = args.gamma;
  manifest.alpha = args.alpha;
  manifest.mode = args.mode;
  manifest.seed = args.seed;
  manifest.version = selinf::kVersion;

  double sigma2;
  if (args.sigma > 0.0) {
    sigma2 = args.sigma * args.sigma;
    manifest.sigma_source = "user";
  } else {
    sigma2 = selinf::estimate_sigma(X, y);
    manifest.sigma_source = "estimated";
  }

  double lambda;
  if (args.lambda == "auto") {
    lambda = selinf::select_lambda(X, sigma2, args.lambda_draws, args.seed);
    manifest.lambda_source = "auto";
  } else {
    lambda = selinf::parse_double(args.lambda);
    if (!(lambda > 0.0))
      throw selinf::ValidationError("--lambda must be positive or 'auto'");
    manifest.lambda_source = selinf::format_double(lambda);
  }

  selinf::InferOptions opts;
  opts.alpha = args.alpha;
  if (args.mode == "sign") opts.mode = selinf::Mode::kSign;
  else if (args.mode == "model") opts.mode = selinf::Mode::kModel;
  else throw selinf::ValidationError("--mode must be sign or model");

  const selinf::InferenceResult result =
      selinf::infer(X, y, selinf::PenaltySpec(lambda, args.gamma), sigma2, opts);

  const json j = selinf::to_json(result, manifest, X.column_names);
  write_outputs(args.out_dir, "intervals", j,
                selinf::intervals_csv(result, X.column_names), args.format);
  std::cerr << "lambda = " << lambda << ", sigma2 = " << sigma2 << ", |M| = "
            << result.model.size() << " (" << timer.seconds() << " s)\n";
  if (result.null_model) {
    std::cerr << "null model: no variables selected at this lambda\n";
    return kNullModel;
  }
  if (!result.failures.empty() && result.intervals.empty())
    return kNumericalError;
  return kOk;
}

struct SimulateArgs {
  std::string config_path;
  std::string experiment = "coverage";
  int replications = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string mode;
  double alpha = -1.0;
  std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& args) {
  Timer timer;
  json config_json;
  {
    std::ifstream in(args.config_path);
    if (!in)
      throw selinf::ValidationError("cannot open config " + args.config_path);
    in >> config_json;
  }
  selinf::ExperimentConfig config = selinf::config_from_json(config_json);
  if (args.replications >= 0) config.replications = args.replications;
  if (args.seed_set) config.seed = args.seed;
  if (args.alpha > 0.0) config.alpha = args.alpha;
  if (!args.mode.empty()) {
    if (args.mode == "sign") config.mode = selinf::Mode::kSign;
    else if (args.mode == "model") config.mode = selinf::Mode::kModel;
    else throw selinf::ValidationError("--mode must be sign or model");
  }
  if (config.replications < 1)
    throw selinf::ValidationError("replications must be >= 1");

  const std::string experiment =
      config_json.value("experiment", args.experiment);
  bool valid = true;
  json report;
  selinf::SimulationRun run;
  if (experiment == "coverage") {
    run = selinf::simulate_replications(config);
    const selinf::CoverageReport cov = selinf::summarize_coverage(run);
    report = selinf::to_json(cov);
    valid = cov.valid;
  } else if (experiment == "pivot") {
    run = selinf::simulate_replications(config);
    const selinf::CoverageReport cov = selinf::summarize_coverage(run);
    selinf::PivotReport piv;
    piv.config = run.config;
    piv.lambda = run.lambda;
    piv.ks = cov.ks;
    piv.ks_pooled = cov.ks_pooled;
    piv.valid = cov.valid;
    std::map<int, std::vector<double>> per_coef;
    for (const selinf::TargetRecord& r : run.records)
      if (r.model_size > 0) per_coef[r.coef_index].push_back(r.pivot_truth);
    for (auto& [coef, sample] : per_coef)
      piv.per_coefficient[coef] = selinf::ks_uniform(std::move(sample));
    report = selinf::to_json(piv);
    valid = piv.valid;
  } else if (experiment == "width") {
    config.width_extras = true;
    run = selinf::simulate_replications(config);
    const selinf::WidthReport width = selinf::summarize_width(run);
    report = selinf::to_json(width);
    valid = width.valid;
  } else {
    throw selinf::ValidationError("unknown experiment '" + experiment + "'");
  }

  write_outputs(args.out_dir, "report", report, selinf::records_csv(run),
                "both");
  std::cerr << "experiment " << experiment << ": " << config.replications
            << " replications in " << timer.seconds() << " s\n";
  if (!valid) {
    std::cerr << "failure budget exceeded; report flagged invalid\n";
    return kNumericalError;
  }
  return kOk;
}

struct TnciArgs {
  double a = -3.0;
  double b = 3.0;
  double alpha = 0.1;
  double xmin = std::numeric_limits<double>::quiet_NaN();
  double xmax = std::numeric_limits<double>::quiet_NaN();
  int grid = 121;
  std::string out;
};

int cmd_tnci(const TnciArgs& args) {
  if (!(args.a < args.b))
    throw selinf::ValidationError("--a must be strictly below --b");
  if (args.grid < 1) throw selinf::ValidationError("--grid must be >= 1");
  const selinf::TruncationRegion region({{args.a, args.b}});
  const double eps = 1e-9 * (args.b - args.a);
  const double lo = std::isnan(args.xmin) ? args.a + eps : args.xmin;
  const double hi = std::isnan(args.xmax) ? args.b - eps : args.xmax;
  std::string out = "x,lower,upper\n";
  for (int i = 0; i < args.grid; ++i) {
    const double x =
        args.grid == 1 ? lo : lo + (hi - lo) * i / (args.grid - 1);
    const auto [L, U] = selinf::tn_interval_bounds(x, 1.0, region, args.alpha);
    out += selinf::format_double(x) + ',' + selinf::format_double(L) + ',' +
           selinf::format_double(U) + '\n';
  }
  if (args.out.empty()) {
    std::cout << out;
  } else {
    selinf::atomic_write(args.out, out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact post-selection inference for lasso-selected models"};
  app.set_version_flag("--version", selinf::kVersion);
  app.require_subcommand(1);

  InferArgs infer_args;
  CLI::App* infer = app.add_subcommand(
      "infer", "Selective intervals for a lasso fit on CSV data");
  infer->add_option("--data", infer_args.data, "input CSV")->required();
  infer->add_option("--response", infer_args.response, "response column name")
      ->required();
  infer->add_flag("--standardize", infer_args.standardize,
                  "center and scale predictors to unit norm, center response");
  infer->add_option("--lambda", infer_args.lambda,
                    "l1 penalty, or 'auto' for 2 E||X^T eps||_inf");
  infer->add_option("--gamma", infer_args.gamma, "l2 penalty (elastic net)");
  infer->add_option("--sigma", infer_args.sigma,
                    "noise standard deviation; estimated from the full model "
                    "when omitted");
  infer->add_option("--alpha", infer_args.alpha, "1 - confidence level");
  infer->add_option("--mode", infer_args.mode, "sign or model conditioning");
  infer->add_option("--seed", infer_args.seed, "seed for the lambda rule");
  infer->add_option("--out-dir", infer_args.out_dir, "output directory");
  infer->add_option("--format", infer_args.format, "json, csv, or both");
  infer->add_option("--lambda-draws", infer_args.lambda_draws,
                    "Monte Carlo draws for --lambda auto");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo coverage / pivot / width experiments");
  simulate->add_option("--config", sim_args.config_path, "experiment JSON")
      ->required();
  simulate->add_option("--experiment", sim_args.experiment,
                       "coverage, pivot, or width");
  simulate->add_option("--replications", sim_args.replications,
                       "override replication count");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", sim_args.seed, "override seed");
  simulate->add_option("--alpha", sim_args.alpha, "override alpha");
  simulate->add_option("--mode", sim_args.mode, "override conditioning mode");
  simulate->add_option("--out-dir", sim_args.out_dir, "output directory");

  TnciArgs tnci_args;
  CLI::App* tnci = app.add_subcommand(
      "tnci", "Equal-tailed interval bounds for one truncated observation");
  tnci->add_option("--a", tnci_args.a, "lower truncation limit");
  tnci->add_option("--b", tnci_args.b, "upper truncation limit");
  tnci->add_option("--alpha", tnci_args.alpha, "1 - confidence level");
  tnci->add_option("--xmin", tnci_args.xmin, "grid start (default: a)");
  tnci->add_option("--xmax", tnci_args.xmax, "grid end (default: b)");
  tnci->add_option("--grid", tnci_args.grid, "number of grid points");
  tnci->add_option("--out", tnci_args.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  sim_args.seed_set = seed_opt->count() > 0;

  try {
    if (infer->parsed()) return cmd_infer(infer_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (tnci->parsed()) return cmd_tnci(tnci_args);
  } catch (const selinf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const selinf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kValidationError;
}
