#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_lib.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(PPSC_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = WEXITSTATUS(raw);
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ppsc_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kConfigs = std::string(PPSC_DATA_DIR) + "/configs/";

}  // namespace

TEST_CASE("run emits the symbolic section and traces") {
  const fs::path dir = fresh_dir("run_demo5");
  const CliResult res =
      run_cli("run --config " + kConfigs + "demo5_run.json --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("x4 = b2+b3+b4+b5 -g1 -g2 -g4") != std::string::npos);
  CHECK(res.out.find("summation_consistency: PASS") != std::string::npos);
  CHECK(res.out.find("graph_compliance: PASS") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "report.txt"));
  CHECK(fs::exists(dir / "out" / "summary.csv"));
  CHECK(fs::exists(dir / "out" / "trace_0.json"));
  CHECK(fs::exists(dir / "out" / "trace_2.json"));

  const auto trace = nlohmann::json::parse(slurp(dir / "out" / "trace_0.json"));
  CHECK(trace["steps"].size() == 4);
  CHECK(trace["steps"][0].contains("gamma"));

  const std::string csv = slurp(dir / "out" / "summary.csv");
  CHECK(csv.find("# ppsc-summary v1") != std::string::npos);
  CHECK(csv.find("dppsc") != std::string::npos);
}

TEST_CASE("byte-identical reports across invocations") {
  const fs::path dir = fresh_dir("run_repro");
  const std::string cfg = kConfigs + "demo5_run.json";
  const CliResult a = run_cli("run --config " + cfg + " --out " + (dir / "a").string(), dir);
  const CliResult b = run_cli("run --config " + cfg + " --out " + (dir / "b").string(), dir);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir / "a" / "report.txt") == slurp(dir / "b" / "report.txt"));
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  for (int r = 0; r < 3; ++r) {
    const std::string name = "trace_" + std::to_string(r) + ".json";
    const std::string ta = slurp(dir / "a" / name);
    CHECK_FALSE(ta.empty());
    CHECK(ta == slurp(dir / "b" / name));
  }
}

TEST_CASE("redacted traces drop the debug fields") {
  const fs::path dir = fresh_dir("run_redact");
  const CliResult res = run_cli(
      "run --config " + kConfigs + "demo5_run.json --redact --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 0);
  const auto trace = nlohmann::json::parse(slurp(dir / "out" / "trace_0.json"));
  for (const auto& step : trace["steps"]) {
    CHECK_FALSE(step.contains("gamma"));
    CHECK_FALSE(step.contains("state"));
    CHECK(step.contains("omega"));
  }
}

TEST_CASE("missing graph file exits with the config code and names the path") {
  const fs::path dir = fresh_dir("missing_graph");
  std::ofstream cfg(dir / "bad.json");
  cfg << R"({"graph_path": "no_such_graph.txt", "algorithm": "dppsc", "seeds": {"master": 1}})";
  cfg.close();
  const CliResult res = run_cli("run --config " + (dir / "bad.json").string(), dir);
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("no_such_graph.txt") != std::string::npos);
}

TEST_CASE("zero runs succeed with an empty summary") {
  const fs::path dir = fresh_dir("zero_runs");
  std::ofstream cfg(dir / "zero.json");
  cfg << R"({"graph_path": ")" << std::string(PPSC_DATA_DIR)
      << R"(/graphs/demo5.txt", "algorithm": "dppsc", "seeds": {"master": 3, "runs": 0}})";
  cfg.close();
  const CliResult res = run_cli(
      "run --config " + (dir / "zero.json").string() + " --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(dir / "out" / "summary.csv");
  CHECK(csv.find("# ppsc-summary v1") != std::string::npos);
  CHECK(csv.rfind('\n') == csv.size() - 1);
  int data_lines = 0;
  std::istringstream lines(csv);
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty() && line[0] != '#') ++data_lines;
  }
  CHECK(data_lines == 0);
}

TEST_CASE("master seed is mandatory") {
  const fs::path dir = fresh_dir("no_seed");
  std::ofstream cfg(dir / "noseed.json");
  cfg << R"({"graph_path": ")" << std::string(PPSC_DATA_DIR)
      << R"(/graphs/demo5.txt", "algorithm": "dppsc"})";
  cfg.close();
  const CliResult res = run_cli("run --config " + (dir / "noseed.json").string(), dir);
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("seeds.master") != std::string::npos);
}

TEST_CASE("attack writes the adversary report") {
  const fs::path dir = fresh_dir("attack");
  const CliResult res = run_cli(
      "attack --config " + kConfigs + "demo5_attack.json --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "attack_report.json"));
  CHECK(doc.contains("epsilon_bound"));
  CHECK(doc.contains("max_log_ratio"));
  CHECK(doc["max_log_ratio"].get<double>() <= doc["epsilon_bound"].get<double>());
  CHECK(doc["mle"]["unique"] == false);
  CHECK(doc["mle"]["kernel_dim"] == 3);
  CHECK(doc["map"]["point"].size() == 5);
}

TEST_CASE("analyze writes the encryption report") {
  const fs::path dir = fresh_dir("analyze");
  const CliResult res = run_cli(
      "analyze --config " + kConfigs + "ring10_analyze.json --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "analysis_report.json"));
  CHECK(doc["xi"].size() == 10);
  CHECK(doc["bounds"]["prop2"].size() == 3);
  const double lower = doc["bounds"]["prop3"]["lower"].get<double>();
  const double upper = doc["bounds"]["prop3"]["upper"].get<double>();
  const int t_eps = doc["mc"]["t_eps"].get<int>();
  CHECK(lower <= t_eps);
  CHECK(t_eps <= std::ceil(upper));  // integer inf vs real-valued bound
}

TEST_CASE("rppsc run conserves the sum") {
  const fs::path dir = fresh_dir("rppsc");
  const CliResult res = run_cli(
      "run --config " + kConfigs + "demo5_rppsc.json --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("summation_consistency: PASS") != std::string::npos);
  const auto trace = nlohmann::json::parse(slurp(dir / "out" / "trace_0.json"));
  CHECK(trace["algorithm"] == "rppsc");
  CHECK(trace["steps"].size() == 40);
}

TEST_CASE("verify fixture negative control fails the structural suite") {
  // Library-level: corrupted D (duplicated column) must fail, pristine must pass.
  const ppsc::cli::ExperimentConfig bad =
      ppsc::cli::load_config(kConfigs + "verify_bad_fixture.json");
  REQUIRE(bad.verify_fixture.has_value());
  const auto bad_res = ppsc::verify::mechanism_structure_check(
      ppsc::symbolic::MechanismMatrices{bad.verify_fixture->c, bad.verify_fixture->d}, "bad");
  CHECK_FALSE(bad_res.pass);

  const ppsc::cli::ExperimentConfig good =
      ppsc::cli::load_config(kConfigs + "verify_good_fixture.json");
  REQUIRE(good.verify_fixture.has_value());
  const auto good_res = ppsc::verify::mechanism_structure_check(
      ppsc::symbolic::MechanismMatrices{good.verify_fixture->c, good.verify_fixture->d}, "good");
  CHECK(good_res.pass);
}

TEST_CASE("verify subcommand exit codes") {
  const fs::path dir = fresh_dir("verify_exit");
  const CliResult bad = run_cli("verify --scale small --config " + kConfigs +
                                    "verify_bad_fixture.json --out " + (dir / "bad").string(),
                                dir);
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("[FAIL] structure[config fixture]") != std::string::npos);
  CHECK(bad.out.find("verify: FAILURES") != std::string::npos);

  const CliResult good = run_cli("verify --scale small --config " + kConfigs +
                                     "verify_good_fixture.json --out " + (dir / "good").string(),
                                 dir);
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("verify: ALL PASS") != std::string::npos);
}

TEST_CASE("config parse errors carry context") {
  CHECK_THROWS_AS(ppsc::cli::parse_config("{not json", "mem"), ppsc::cli::ConfigError);
  CHECK_THROWS_WITH_AS(ppsc::cli::parse_config(R"({"algorithm": "dppsc"})", "mem"),
                       doctest::Contains("graph_path"), ppsc::cli::ConfigError);
  CHECK_THROWS_WITH_AS(
      ppsc::cli::parse_config(
          R"({"graph_path": "g.txt", "algorithm": "quantum", "seeds": {"master": 1}})", "mem"),
      doctest::Contains("algorithm"), ppsc::cli::ConfigError);
}

TEST_CASE("reproducibility check passes on the built-in fixture") {
  const fs::path dir = fresh_dir("repro_lib");
  const auto res = ppsc::cli::reproducibility_check(std::nullopt, dir.string());
  CHECK(res.pass);
}
