#include "selinf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selinf/errors.hpp"
#include "selinf/version.hpp"

namespace selinf {

using nlohmann::json;

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(path.string() + " is empty");
  CsvTable table;
  for (const std::string& name : split_line(line)) {
    const std::string t = trim(name);
    if (t.empty())
      throw ValidationError(path.string() + ": empty column name in header");
    table.header.push_back(t);
  }
  const std::size_t ncol = table.header.size();
  std::vector<double> data;
  std::size_t nrow = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != ncol)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(ncol) +
                            " cells, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < ncol; ++c) {
      const std::string cell = trim(cells[c]);
      try {
        data.push_back(parse_double(cell));
      } catch (const Error&) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                              ": non-numeric cell '" + cell + "' in column '" +
                              table.header[c] + "'");
      }
    }
    ++nrow;
  }
  if (nrow == 0) throw ValidationError(path.string() + " has no data rows");
  table.values.resize(nrow, ncol);
  for (std::size_t r = 0; r < nrow; ++r)
    for (std::size_t c = 0; c < ncol; ++c)
      table.values(r, c) = data[r * ncol + c];
  return table;
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ValidationError("not a number: '" + s + "'");
  return value;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

json to_json(const RunManifest& m) {
  return json{{"command", m.command},
              {"data", m.data_path},
              {"response", m.response},
              {"standardize", m.standardize},
              {"lambda", m.lambda_source},
              {"gamma", m.gamma},
              {"sigma_source", m.sigma_source},
              {"alpha", m.alpha},
              {"mode", m.mode},
              {"seed", m.seed},
              {"version", m.version}};
}

json to_json(const TruncationRegion& region) {
  json out = json::array();
  for (const Interval& iv : region.intervals()) {
    json pair = json::array();
    pair.push_back(std::isfinite(iv.lo) ? json(iv.lo) : json(nullptr));
    pair.push_back(std::isfinite(iv.hi) ? json(iv.hi) : json(nullptr));
    out.push_back(std::move(pair));
  }
  return out;
}

json to_json(const InferenceResult& result, const RunManifest& manifest,
             const std::vector<std::string>& column_names) {
  json intervals = json::array();
  for (const SelectiveInterval& iv : result.intervals) {
    intervals.push_back(json{{"name", iv.target.name},
                             {"estimate", iv.estimate},
                             {"lower", iv.lower},
                             {"upper", iv.upper},
                             {"p_value", iv.pivot_at_zero},
                             {"level", iv.level},
                             {"mode", to_string(iv.mode)},
                             {"region", to_json(iv.region)}});
  }
  json failures = json::array();
  for (const TargetError& f : result.failures)
    failures.push_back(json{{"name", f.name}, {"error", f.message}});
  json model_names = json::array();
  for (int j : result.model) model_names.push_back(column_names[j]);
  return json{{"manifest", to_json(manifest)},
              {"null_model", result.null_model},
              {"model", model_names},
              {"signs", result.signs},
              {"lambda", result.lambda},
              {"gamma", result.gamma},
              {"sigma2", result.sigma2},
              {"intervals", intervals},
              {"failures", failures},
              {"warnings", result.warnings}};
}

std::string intervals_csv(const InferenceResult& result,
                          const std::vector<std::string>&) {
  std::string out = "name,estimate,lower,upper,p_value,level,mode,region\n";
  for (const SelectiveInterval& iv : result.intervals) {
    out += iv.target.name + ',' + format_double(iv.estimate) + ',' +
           format_double(iv.lower) + ',' + format_double(iv.upper) + ',' +
           format_double(iv.pivot_at_zero) + ',' + format_double(iv.level) +
           ',' + to_string(iv.mode) + ',';
    std::string region;
    for (const Interval& seg : iv.region.intervals()) {
      if (!region.empty()) region += '|';
      region += (std::isfinite(seg.lo) ? format_double(seg.lo) : "-inf");
      region += ':';
      region += (std::isfinite(seg.hi) ? format_double(seg.hi) : "inf");
    }
    out += region + '\n';
  }
  return out;
}

namespace {

json to_json(const GroupStats& g) {
  return json{{"intervals", g.intervals},
              {"replications", g.replications},
              {"coverage", g.coverage},
              {"coverage_se", g.coverage_se},
              {"mean_width", g.mean_width},
              {"median_width", g.median_width}};
}

json to_json(const KsResult& ks) {
  return json{{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"n", ks.n}};
}

}  // namespace

json to_json(const ExperimentConfig& config) {
  return json{{"n", config.n},
              {"p", config.p},
              {"true_beta", std::vector<double>(
                                config.true_beta.data(),
                                config.true_beta.data() + config.true_beta.size())},
              {"sigma", config.sigma},
              {"lambda", config.lambda_auto ? json("auto") : json(config.lambda_value)},
              {"lambda_draws", config.lambda_draws},
              {"gamma", config.gamma},
              {"alpha", config.alpha},
              {"replications", config.replications},
              {"mode", to_string(config.mode)},
              {"seed", config.seed},
              {"sign_cap", config.sign_cap},
              {"width_extras", config.width_extras}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  config.n = j.at("n").get<int>();
  config.p = j.at("p").get<int>();
  if (j.contains("true_beta")) {
    const json& tb = j.at("true_beta");
    if (tb.is_array()) {
      std::vector<double> v = tb.get<std::vector<double>>();
      config.true_beta = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
    } else {
      config.true_beta = ExperimentConfig::spiked_beta(
          config.p, tb.at("num_nonzero").get<int>(),
          tb.at("value").get<double>());
    }
  } else {
    config.true_beta = Eigen::VectorXd::Zero(config.p);
  }
  config.sigma = j.value("sigma", 1.0);
  if (j.contains("lambda")) {
    const json& lam = j.at("lambda");
    if (lam.is_string()) {
      if (lam.get<std::string>() != "auto")
        throw ValidationError("config: lambda must be a number or \"auto\"");
      config.lambda_auto = true;
    } else {
      config.lambda_auto = false;
      config.lambda_value = lam.get<double>();
    }
  }
  config.lambda_draws = j.value("lambda_draws", 1000);
  config.gamma = j.value("gamma", 0.0);
  config.alpha = j.value("alpha", 0.1);
  config.replications = j.value("replications", 1000);
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "sign") config.mode = Mode::kSign;
    else if (mode == "model") config.mode = Mode::kModel;
    else throw ValidationError("config: mode must be \"sign\" or \"model\"");
  }
  config.seed = j.value("seed", std::uint64_t{1});
  config.sign_cap = j.value("sign_cap", 15);
  config.width_extras = j.value("width_extras", false);
  return config;
}

json to_json(const CoverageReport& report) {
  json by_size = json::object();
  for (const auto& [size, stats] : report.by_model_size)
    by_size[std::to_string(size)] = to_json(stats);
  return json{{"config", to_json(report.config)},
              {"lambda", report.lambda},
              {"replications", report.replications},
              {"failed_replications", report.failed_replications},
              {"failed_targets", report.failed_targets},
              {"null_model_frequency", report.null_model_frequency},
              {"fcr", report.fcr},
              {"fcr_se", report.fcr_se},
              {"pfcr", report.pfcr},
              {"selection_rate", report.selection_rate},
              {"overall", to_json(report.overall)},
              {"by_model_size", by_size},
              {"ks", to_json(report.ks)},
              {"ks_pooled", to_json(report.ks_pooled)},
              {"valid", report.valid}};
}

json to_json(const PivotReport& report) {
  json per_coef = json::object();
  for (const auto& [coef, ks] : report.per_coefficient)
    per_coef[std::to_string(coef)] = to_json(ks);
  return json{{"config", to_json(report.config)},
              {"lambda", report.lambda},
              {"ks", to_json(report.ks)},
              {"ks_pooled", to_json(report.ks_pooled)},
              {"per_coefficient", per_coef},
              {"valid", report.valid}};
}

json to_json(const WidthReport& report) {
  return json{{"config", to_json(report.config)},
              {"lambda", report.lambda},
              {"median_interior_ratio", report.median_interior_ratio},
              {"interior_count", report.interior_count},
              {"split_mean_width", report.split_mean_width},
              {"ols_full_mean_width", report.ols_full_mean_width},
              {"split_to_ols_ratio", report.split_to_ols_ratio},
              {"naive_coverage", report.naive_coverage},
              {"split_coverage", report.split_coverage},
              {"split_count", report.split_count},
              {"valid", report.valid}};
}

std::string records_csv(const SimulationRun& run) {
  std::string out =
      "rep,coef_index,model_size,truth,estimate,lower,upper,covered,"
      "pivot_truth,pivot_shifted,sd_eta,dist_to_boundary,ks_pick,naive_lower,naive_upper,"
      "naive_covered,model_lower,model_upper,has_model,split_width,"
      "ols_full_width,split_covered,has_split\n";
  for (const TargetRecord& r : run.records) {
    out += std::to_string(r.rep) + ',' + std::to_string(r.coef_index) + ',' +
           std::to_string(r.model_size) + ',' + format_double(r.truth) + ',' +
           format_double(r.estimate) + ',' + format_double(r.lower) + ',' +
           format_double(r.upper) + ',' + (r.covered ? "1" : "0") + ',' +
           format_double(r.pivot_truth) + ',' +
           format_double(r.pivot_shifted) + ',' + format_double(r.sd_eta) +
           ',' + format_double(r.dist_to_boundary) + ',' +
           (r.ks_pick ? "1" : "0") +
           ',' + format_double(r.naive_lower) + ',' +
           format_double(r.naive_upper) + ',' + (r.naive_covered ? "1" : "0") +
           ',' + format_double(r.model_lower) + ',' +
           format_double(r.model_upper) + ',' + (r.has_model ? "1" : "0") +
           ',' + format_double(r.split_width) + ',' +
           format_double(r.ols_full_width) + ',' +
           (r.split_covered ? "1" : "0") + ',' + (r.has_split ? "1" : "0") +
           '\n';
  }
  return out;
}

}  // namespace selinf
