#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fewcycle/engine.hpp"

namespace fewcycle {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  std::string out_dir = "validate_out"; // campaign emission root
  int workers = 0;                      // 0 = hardware concurrency
  IntegratorConfig integrator{};        // fixed-step defaults
  std::vector<int> only;                // criterion ids to run; empty = all
};

// Runs the analytic-vs-numeric validation battery (criteria 1-10) and
// returns one result per criterion run.  Criterion 10 emits the full
// campaign file set twice under out_dir and byte-compares the data files.
std::vector<CriterionResult> run_acceptance(const ValidateOptions& opts);

bool all_passed(const std::vector<CriterionResult>& results);

// One line per criterion: "C03 FAIL <name>: <detail>".
void print_results(std::ostream& os, const std::vector<CriterionResult>& results);

// Writes the campaign data files (traces, scans, map, sweeps) into dir.
// Returns the list of data file names written (manifest sidecars excluded).
std::vector<std::string> emit_campaign(const std::string& dir,
                                       const ValidateOptions& opts);

} // namespace fewcycle
