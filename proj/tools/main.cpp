#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli_lib.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gossip-based privacy-preserving summation: runner, verifier, attacker, analyzer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string scale = "small";
  bool redact = false;

  CLI::App* run = app.add_subcommand("run", "Execute the configured mechanism and emit traces");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
  run->add_flag("--redact", redact, "Drop gamma and state from trace JSON (wire view only)");

  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance/invariant suites");
  verify->add_option("--config", config_path, "Optional config (enables fixture checks)");
  verify->add_option("--scale", scale, "small|full")->check(CLI::IsMember({"small", "full"}));
  verify->add_option("--out", out_dir, "Scratch directory for the reproducibility check");

  CLI::App* attack = app.add_subcommand("attack", "MLE/MAP reconstruction and DP ratio check");
  attack->add_option("--config", config_path, "Experiment config (JSON)")->required();
  attack->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");

  CLI::App* analyze = app.add_subcommand("analyze", "Encryption-time analysis report");
  analyze->add_option("--config", config_path, "Experiment config (JSON)")->required();
  analyze->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const ppsc::cli::Report rep =
          ppsc::cli::cmd_run(ppsc::cli::load_config(config_path), out_dir, redact);
      std::cout << rep.text;
      return rep.ok ? kExitOk : kExitSuiteFailure;
    }
    if (verify->parsed()) {
      std::optional<ppsc::cli::ExperimentConfig> cfg;
      if (!config_path.empty()) cfg = ppsc::cli::load_config(config_path);
      const std::string work = out_dir.empty() ? "verify_out" : out_dir;
      const ppsc::cli::Report rep =
          ppsc::cli::cmd_verify(cfg, ppsc::verify::scale_from_string(scale), work);
      std::cout << rep.text;
      std::cout << (rep.ok ? "verify: ALL PASS\n" : "verify: FAILURES\n");
      return rep.ok ? kExitOk : kExitSuiteFailure;
    }
    if (attack->parsed()) {
      const ppsc::cli::Report rep =
          ppsc::cli::cmd_attack(ppsc::cli::load_config(config_path), out_dir);
      std::cout << rep.text;
      return rep.ok ? kExitOk : kExitSuiteFailure;
    }
    if (analyze->parsed()) {
      const ppsc::cli::Report rep =
          ppsc::cli::cmd_analyze(ppsc::cli::load_config(config_path), out_dir);
      std::cout << rep.text;
      return rep.ok ? kExitOk : kExitSuiteFailure;
    }
  } catch (const ppsc::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
