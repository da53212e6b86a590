// Runs criteria 1-10 and prints one PASS/FAIL line each; exit 1 on any FAIL.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "pcover/acceptance.hpp"

int main(int argc, char** argv) {
  pcover::acceptance::Config cfg;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      cfg.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--quick") {
      cfg.quick = true;
    } else if (arg == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      std::cerr << "usage: pcover_acceptance [--seed S] [--quick] [--report FILE]\n";
      return 2;
    }
  }
  bool all = true;
  const auto results = pcover::acceptance::run_all(cfg, [&](const pcover::acceptance::CriterionResult& r) {
    std::cout << pcover::acceptance::summary_line(r) << std::endl;
    all = all && r.passed;
  });
  if (!report_path.empty()) {
    std::ofstream(report_path) << pcover::acceptance::report(cfg, results).dump(2) << "\n";
  }
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
