#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selinf/pipeline.hpp"

namespace selinf {

/// One-sample Kolmogorov-Smirnov test against Uniform(0, 1).
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};
KsResult ks_uniform(std::vector<double> sample);

struct ExperimentConfig {
  int n = 10;
  int p = 5;
  Eigen::VectorXd true_beta;  // length p
  double sigma = 1.0;
  bool lambda_auto = true;    // expectation rule, computed once per config
  double lambda_value = 0.0;
  int lambda_draws = 1000;
  double gamma = 0.0;
  double alpha = 0.1;
  int replications = 1000;
  Mode mode = Mode::kSign;
  std::uint64_t seed = 1;
  int sign_cap = 15;
  double failure_budget = 0.01;

  // Width-comparison extras: also invert the model-conditioned region and
  // run the data-splitting baseline per replication.
  bool width_extras = false;

  void validate() const;

  /// First `num_nonzero` coefficients set to `value`, rest zero.
  static Eigen::VectorXd spiked_beta(int p, int num_nonzero, double value);
};

/// One selected coefficient in one replication.
struct TargetRecord {
  int rep = 0;
  int coef_index = 0;
  int model_size = 0;
  double truth = 0.0;  // beta^Mhat_j = e_j^T X_Mhat^dagger mu for this rep
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
  double pivot_truth = 0.0;     // left pivot at the true parameter
  double pivot_shifted = 0.0;   // left pivot at truth + 5 sd_eta (power check)
  double sd_eta = 0.0;          // contrast standard deviation
  double dist_to_boundary = 0.0;  // min gap to the truncation limits, in sd units
  bool ks_pick = false;         // member of the one-per-replication KS stream
  double naive_lower = 0.0;     // OLS-on-selected, selection ignored
  double naive_upper = 0.0;
  bool naive_covered = false;
  // width_extras only:
  double model_lower = 0.0, model_upper = 0.0;
  bool has_model = false;
  double split_width = 0.0, ols_full_width = 0.0;
  bool has_split = false;
  bool split_covered = false;
};

struct ReplicationStatus {
  int rep = 0;
  int model_size = -1;  // -1: replication failed outright
  int target_failures = 0;
  std::string error;
};

/// Raw per-replication output; the reports below aggregate it.
struct SimulationRun {
  ExperimentConfig config;
  double lambda = 0.0;
  std::vector<TargetRecord> records;
  std::vector<ReplicationStatus> status;
  int failed_replications = 0;
  int failed_targets = 0;
  int null_models = 0;
  bool within_budget = true;
};

SimulationRun simulate_replications(const ExperimentConfig& config);

struct GroupStats {
  std::size_t intervals = 0;
  std::size_t replications = 0;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double mean_width = 0.0;
  double median_width = 0.0;
};

struct CoverageReport {
  ExperimentConfig config;
  double lambda = 0.0;
  std::size_t replications = 0;
  int failed_replications = 0;
  int failed_targets = 0;
  double null_model_frequency = 0.0;
  double fcr = 0.0;        // |Mhat| = 0 counts as zero error
  double fcr_se = 0.0;
  double pfcr = 0.0;       // conditional on |Mhat| > 0
  double selection_rate = 0.0;  // P(|Mhat| > 0), so fcr = pfcr * selection_rate
  GroupStats overall;
  std::map<int, GroupStats> by_model_size;
  KsResult ks;         // one pivot per replication (i.i.d. stream)
  KsResult ks_pooled;  // every pivot, dependent within replication
  bool valid = true;
};

CoverageReport run_coverage(const ExperimentConfig& config);
CoverageReport summarize_coverage(const SimulationRun& run);

struct PivotReport {
  ExperimentConfig config;
  double lambda = 0.0;
  KsResult ks;
  KsResult ks_pooled;
  std::map<int, KsResult> per_coefficient;
  bool valid = true;
};

PivotReport run_pivot_uniformity(const ExperimentConfig& config);

struct WidthReport {
  ExperimentConfig config;
  double lambda = 0.0;
  /// Median adjusted/naive width ratio among coefficients at least half a
  /// contrast-sd inside both truncation limits.
  double median_interior_ratio = 0.0;
  std::size_t interior_count = 0;
  double split_mean_width = 0.0;
  double ols_full_mean_width = 0.0;
  double split_to_ols_ratio = 0.0;
  double naive_coverage = 0.0;
  double split_coverage = 0.0;
  std::size_t split_count = 0;
  bool valid = true;
};

WidthReport run_width_comparison(const ExperimentConfig& config);
WidthReport summarize_width(const SimulationRun& run);

}  // namespace selinf
