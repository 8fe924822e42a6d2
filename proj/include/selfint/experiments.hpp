#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "selfint/config.hpp"
#include "selfint/process.hpp"

namespace selfint {

// Mean and sample standard deviation of one statistic over replicas (or of a
// single deterministic value, with count 1 and sd 0).
struct SummaryRow {
  std::string statistic;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

SummaryRow summarize(const std::string& statistic, const std::vector<double>& values);

// A pass/fail rule on the mean of one summary statistic: lo <= mean <= hi.
// Report-only rules are listed but never fail.
struct Rule {
  std::string statistic;
  double lo;
  double hi;
  bool report_only = false;
  std::string description;
};

struct RuleOutcome {
  Rule rule;
  bool found = false;
  double value = 0.0;
  bool pass = false;
};

std::vector<RuleOutcome> evaluate_rules(const std::vector<Rule>& rules,
                                        const std::vector<SummaryRow>& summary);

struct ExperimentResult {
  std::string name;
  std::vector<SummaryRow> summary;
  std::vector<std::pair<std::string, ProcessTrace>> traces;  // (file stem, trace)
  std::vector<std::pair<std::string, std::string>> tables;   // (file stem, CSV text)
};

struct RegistryEntry {
  std::string name;
  std::string criterion;  // acceptance id, e.g. "A4"
  std::string target;     // the result the experiment reproduces
  std::vector<Rule> rules;
  std::function<ExperimentResult(const ExperimentConfig&)> run;
};

const std::vector<RegistryEntry>& registry();
// Throws ValidationError for unknown names.
const RegistryEntry& find_experiment(const std::string& name);

// Writes trace_<stem>.csv per trace, <stem>.csv per table, summary.csv (metadata line first) and
// verdict.txt into `dir`, replacing earlier artifacts of the same names.
std::vector<RuleOutcome> write_artifacts(const RegistryEntry& entry, const ExperimentResult& result,
                                         const std::filesystem::path& dir);

void write_summary_csv(std::ostream& out, const RegistryEntry& entry,
                       const std::vector<SummaryRow>& summary);
void write_verdict(std::ostream& out, const RegistryEntry& entry,
                   const std::vector<RuleOutcome>& outcomes);

struct LoadedSummary {
  std::string experiment;
  std::vector<SummaryRow> rows;
};
LoadedSummary read_summary_csv(const std::filesystem::path& path);

bool all_pass(const std::vector<RuleOutcome>& outcomes);

// Built-in fixtures, used when a config names no file.
Landscape path_landscape_fixture();        // U = (0, 3, 1, 2, 0) on a 5-state path
MarkovMatrix four_state_fixture();         // irreducible, non-reversible
Matrix symmetric_interaction_fixture();    // 3-state symmetric positive
TwoPlayerGame matching_fixture();          // U1 = [[0, -1], [-1, 0]], zero-sum

}  // namespace selfint
