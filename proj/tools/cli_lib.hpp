#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppsc/graph.hpp"
#include "ppsc/mechanism.hpp"
#include "ppsc/verify.hpp"

namespace ppsc::cli {

// Configuration or I/O problem: maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoiseConfig {
  std::string family = "gaussian";
  double mean = 0.0;
  double variance = 1.0;
};

struct DpConfig {
  double delta = 1.0;
  double v = 1.0;
};

struct AdversaryConfig {
  int l = 10;
  int trials = 1000;
  std::vector<double> prior_mu;  // empty: zeros
  double prior_scale = 1.0;
};

struct AnalysisConfig {
  std::vector<int> t_values = {10, 25, 50};
  double epsilon = 0.01;
  int runs = 20000;
  int t_max = 64;
};

struct FixtureMatrices {
  symbolic::IntMatrix c;
  symbolic::IntMatrix d;
};

struct ExperimentConfig {
  std::string graph_path;
  std::string algorithm = "dppsc";
  NoiseConfig noise;
  std::uint64_t master_seed = 0;
  int runs = 1;
  std::optional<int> steps;  // rppsc
  std::vector<double> beta;  // empty: beta_i = i
  std::vector<netgraph::DirectedEdge> tree;  // empty: seed-derived spanning tree
  DpConfig dp;
  AdversaryConfig adversary;
  AnalysisConfig analysis;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"json", "csv"};
  std::optional<FixtureMatrices> verify_fixture;

  // Normalized echo used in reports; deterministic for fixed input.
  std::string echo_json() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source);

struct Report {
  std::string text;
  bool ok = true;
};

// Executes the configured mechanism for `runs` derived seeds; writes
// trace_<k>.json, summary.csv and report.txt under the output directory.
Report cmd_run(const ExperimentConfig& cfg, const std::string& out_dir_override, bool redact);

// Full verification: acceptance criteria 1-11, the report reproducibility
// check (criterion 12), and the optional fixture negative control.
Report cmd_verify(const std::optional<ExperimentConfig>& cfg, verify::Scale scale,
                  const std::string& work_dir);

// Criterion 12 on its own: runs the same config twice and compares reports
// and traces byte for byte. Without a config a built-in fixture is used.
verify::CheckResult reproducibility_check(const std::optional<ExperimentConfig>& cfg,
                                          const std::string& work_dir);

Report cmd_attack(const ExperimentConfig& cfg, const std::string& out_dir_override);

Report cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir_override);

// Seed for run index k derived from the master seed.
std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index);

}  // namespace ppsc::cli
