#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "selinf/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const char* cli = std::getenv("SELINF_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "SELINF_CLI must point at the selinf binary");
  const std::string cmd = std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe))
    output.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

fs::path write_toy_csv() {
  // y depends strongly on a and b, not on c/d; n=40
  const fs::path path = fs::temp_directory_path() / "selinf_cli_toy.csv";
  std::ofstream out(path, std::ios::trunc);
  out << "a,b,c,d,y\n";
  unsigned state = 12345;
  auto uniform = [&state]() {
    state = state * 1664525u + 1013904223u;
    return (state >> 8) / 16777216.0 - 0.5;
  };
  for (int i = 0; i < 40; ++i) {
    const double a = uniform(), b = uniform(), c = uniform(), d = uniform();
    const double noise = 0.1 * uniform();
    const double y = 5.0 * a - 4.0 * b + noise;
    out << a << ',' << b << ',' << c << ',' << d << ',' << y << "\n";
  }
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("tnci rejects a >= b and emits a symmetric table") {
  CHECK(run_cli("tnci --a 2 --b 1").exit_code == 2);

  const RunResult res = run_cli("tnci --a -3 --b 3 --xmin -2.5 --xmax 2.5 --grid 11");
  REQUIRE(res.exit_code == 0);
  std::vector<std::array<double, 3>> rows;
  std::istringstream in(res.output);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,lower,upper");
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
    rows.push_back({selinf::parse_double(line.substr(0, c1)),
                    selinf::parse_double(line.substr(c1 + 1, c2 - c1 - 1)),
                    selinf::parse_double(line.substr(c2 + 1))});
  }
  REQUIRE(rows.size() == 11);
  // L(x) = -U(-x) by symmetry of the truncated family
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& fwd = rows[i];
    const auto& rev = rows[rows.size() - 1 - i];
    CHECK(fwd[0] == doctest::Approx(-rev[0]).epsilon(1e-12));
    CHECK(fwd[1] == doctest::Approx(-rev[2]).epsilon(1e-8));
  }
  // comparable width at the center, wider near the boundary
  const double width_center = rows[5][2] - rows[5][1];
  CHECK(width_center > 0.9 * 3.2897);
  CHECK(width_center < 1.1 * 3.2897);
  const RunResult near = run_cli("tnci --a -3 --b 3 --xmin 2.9 --xmax 2.9 --grid 1");
  REQUIRE(near.exit_code == 0);
  std::istringstream nin(near.output);
  std::getline(nin, line);
  std::getline(nin, line);
  const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
  const double near_width = selinf::parse_double(line.substr(c2 + 1)) -
                            selinf::parse_double(line.substr(c1 + 1, c2 - c1 - 1));
  CHECK(near_width > width_center);
}

TEST_CASE("infer end to end on a toy dataset") {
  const fs::path data = write_toy_csv();
  const fs::path out = fresh_dir("selinf_cli_infer");
  const RunResult res = run_cli("infer --data " + data.string() +
                                " --response y --standardize --lambda auto"
                                " --alpha 0.1 --mode sign --seed 5 --out-dir " +
                                out.string());
  CAPTURE(res.output);
  REQUIRE(res.exit_code == 0);

  const json j = json::parse(slurp(out / "intervals.json"));
  CHECK(j["manifest"]["sigma_source"] == "estimated");
  CHECK(j["manifest"]["lambda"] == "auto");
  CHECK(j["null_model"] == false);
  REQUIRE(j["intervals"].size() >= 2);
  std::vector<std::string> model = j["model"];
  CHECK(std::find(model.begin(), model.end(), "a") != model.end());
  CHECK(std::find(model.begin(), model.end(), "b") != model.end());

  // csv round trip: numeric fields equal the json ones bit for bit
  std::istringstream csv(slurp(out / "intervals.csv"));
  std::string line;
  std::getline(csv, line);
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t pos = line.find(','); pos != std::string::npos;
         pos = line.find(',', start)) {
      cells.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    cells.push_back(line.substr(start));
    const json& iv = j["intervals"][row];
    CHECK(cells[0] == iv["name"].get<std::string>());
    CHECK(selinf::parse_double(cells[1]) == iv["estimate"].get<double>());
    CHECK(selinf::parse_double(cells[2]) == iv["lower"].get<double>());
    CHECK(selinf::parse_double(cells[3]) == iv["upper"].get<double>());
    CHECK(selinf::parse_double(cells[4]) == iv["p_value"].get<double>());
    ++row;
  }
  CHECK(row == j["intervals"].size());

  // rerunning with the same seed reproduces the artifacts byte for byte
  const fs::path out2 = fresh_dir("selinf_cli_infer2");
  const RunResult res2 = run_cli("infer --data " + data.string() +
                                 " --response y --standardize --lambda auto"
                                 " --alpha 0.1 --mode sign --seed 5 --out-dir " +
                                 out2.string());
  REQUIRE(res2.exit_code == 0);
  CHECK(slurp(out / "intervals.json") == slurp(out2 / "intervals.json"));
  CHECK(slurp(out / "intervals.csv") == slurp(out2 / "intervals.csv"));
}

TEST_CASE("infer flag handling and exit codes") {
  const fs::path data = write_toy_csv();
  const fs::path out = fresh_dir("selinf_cli_codes");

  // giant lambda: null model, exit 4, artifact with empty intervals
  const RunResult null_res = run_cli("infer --data " + data.string() +
                                     " --response y --lambda 1e9 --out-dir " +
                                     out.string());
  CHECK(null_res.exit_code == 4);
  const json null_json = json::parse(slurp(out / "intervals.json"));
  CHECK(null_json["null_model"] == true);
  CHECK(null_json["intervals"].empty());

  // user-supplied sigma is recorded in the manifest
  const RunResult user_sigma = run_cli("infer --data " + data.string() +
                                       " --response y --standardize"
                                       " --lambda 0.5 --sigma 2.0 --out-dir " +
                                       out.string());
  CHECK(user_sigma.exit_code == 0);
  CHECK(json::parse(slurp(out / "intervals.json"))["manifest"]["sigma_source"] ==
        "user");

  // unknown response column and malformed csv are validation errors
  CHECK(run_cli("infer --data " + data.string() +
                " --response zz --out-dir " + out.string())
            .exit_code == 2);
  const fs::path bad = fs::temp_directory_path() / "selinf_cli_bad.csv";
  std::ofstream(bad, std::ios::trunc) << "a,y\n1,2\n3,oops\n";
  CHECK(run_cli("infer --data " + bad.string() + " --response y --out-dir " +
                out.string())
            .exit_code == 2);
}

TEST_CASE("simulate: config file, overrides, determinism") {
  const char* config_dir = std::getenv("SELINF_CONFIG_DIR");
  REQUIRE_MESSAGE(config_dir != nullptr, "SELINF_CONFIG_DIR must be set");
  const fs::path config =
      fs::path(config_dir) / "fig_ci_comparison.json";
  REQUIRE(fs::exists(config));

  const fs::path out = fresh_dir("selinf_cli_sim");
  CHECK(run_cli("simulate --config " + config.string() +
                " --replications 0 --out-dir " + out.string())
            .exit_code == 2);

  const std::string base = "simulate --config " + config.string() +
                           " --replications 6 --seed 11 --out-dir ";
  const RunResult a = run_cli(base + out.string());
  CAPTURE(a.output);
  REQUIRE(a.exit_code == 0);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["config"]["replications"] == 6);
  CHECK(report["valid"] == true);
  CHECK(report.contains("split_to_ols_ratio"));

  const fs::path out2 = fresh_dir("selinf_cli_sim2");
  const RunResult b = run_cli(base + out2.string());
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(out / "report.json") == slurp(out2 / "report.json"));
  CHECK(slurp(out / "report.csv") == slurp(out2 / "report.csv"));
}

TEST_SUITE_END();
