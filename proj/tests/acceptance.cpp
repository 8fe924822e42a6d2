// Runs every registered experiment with its default parameters and prints one
// PASS/FAIL line per acceptance criterion. Artifacts go to argv[1] if given.

#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "selfint/experiments.hpp"

using namespace selfint;

int main(int argc, char** argv) {
  const std::filesystem::path out_root = argc > 1 ? argv[1] : "";
  int failures = 0;
  for (const auto& entry : registry()) {
    std::ostringstream detail;
    bool pass = false;
    try {
      const ExperimentResult result = entry.run(ExperimentConfig::defaults(entry.name));
      const auto outcomes = out_root.empty() ? evaluate_rules(entry.rules, result.summary)
                                             : write_artifacts(entry, result, out_root / entry.name);
      pass = all_pass(outcomes);
      for (const auto& o : outcomes) {
        detail << ' ' << o.rule.statistic << '=';
        if (o.found)
          detail << o.value;
        else
          detail << "missing";
        if (o.rule.report_only) detail << "(report)";
        else if (!o.pass) detail << "(fail)";
      }
    } catch (const std::exception& e) {
      detail << " error: " << e.what();
    }
    if (!pass) ++failures;
    std::cout << (pass ? "PASS " : "FAIL ") << entry.criterion << ' ' << entry.name << ':'
              << detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
