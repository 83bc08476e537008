#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nbs {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// The full verification suite; tolerance_scale loosens (>1) or tightens (<1)
// the pinned comparison tolerances for tolerance studies.
std::vector<CriterionResult> run_acceptance_suite(double tolerance_scale = 1.0);

// Prints one PASS/FAIL line per criterion; returns true iff all pass.
bool report_acceptance(std::ostream& os,
                       const std::vector<CriterionResult>& results);

}  // namespace nbs
