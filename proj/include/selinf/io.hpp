#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "selinf/pipeline.hpp"
#include "selinf/simulate.hpp"

namespace selinf {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Parse a numeric CSV with a header row. Malformed rows and non-numeric
/// cells raise ValidationError naming the line and column.
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Write via a temp file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Everything that determines a run; serialized alongside results. Timing is
/// deliberately not part of it (outputs must be byte-identical given a seed).
struct RunManifest {
  std::string command;
  std::string data_path;
  std::string response;
  bool standardize = false;
  std::string lambda_source;  // "auto" or the fixed value
  double gamma = 0.0;
  std::string sigma_source;   // "user" or "estimated"
  double alpha = 0.1;
  std::string mode;
  std::uint64_t seed = 0;
  std::string version;
};

nlohmann::json to_json(const RunManifest& manifest);
nlohmann::json to_json(const TruncationRegion& region);
nlohmann::json to_json(const InferenceResult& result, const RunManifest& manifest,
                       const std::vector<std::string>& column_names);
nlohmann::json to_json(const CoverageReport& report);
nlohmann::json to_json(const PivotReport& report);
nlohmann::json to_json(const WidthReport& report);

std::string intervals_csv(const InferenceResult& result,
                          const std::vector<std::string>& column_names);
std::string records_csv(const SimulationRun& run);

/// Experiment configuration from JSON; accepts either an explicit
/// "true_beta" array or {"num_nonzero": k, "value": v}.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace selinf
