// Runs the full verification suite and prints one PASS/FAIL line per
// criterion. Exit status is nonzero if any criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "nbscatter/acceptance.hpp"

int main(int argc, char** argv) {
  double tolerance_scale = 1.0;
  if (argc > 1) tolerance_scale = std::stod(argv[1]);
  auto results = nbs::run_acceptance_suite(tolerance_scale);
  bool ok = nbs::report_acceptance(std::cout, results);
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
