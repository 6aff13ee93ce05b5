// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure. `--scale small` trims the sweep sizes for quick iteration.
#include <cstring>
#include <filesystem>
#include <iostream>
#include <string>

#include "cli_lib.hpp"
#include "ppsc/verify.hpp"

int main(int argc, char** argv) {
  ppsc::verify::Scale scale = ppsc::verify::Scale::full;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--scale") == 0 && i + 1 < argc) {
      scale = ppsc::verify::scale_from_string(argv[i + 1]);
      ++i;
    }
  }

  std::vector<ppsc::verify::CheckResult> results =
      ppsc::verify::acceptance_criteria(scale, &std::cout);

  const std::string work =
      (std::filesystem::temp_directory_path() / "ppsc_acceptance_work").string();
  ppsc::verify::CheckResult repro = ppsc::cli::reproducibility_check(std::nullopt, work);
  std::cout << (repro.pass ? "[PASS] " : "[FAIL] ") << repro.name << " (" << repro.seconds
            << " s) " << repro.detail << '\n';
  results.push_back(repro);

  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
  }
  std::cout << (failures == 0 ? "acceptance: ALL PASS" : "acceptance: FAILURES") << " ("
            << results.size() - failures << "/" << results.size() << ")\n";
  return failures == 0 ? 0 : 1;
}
