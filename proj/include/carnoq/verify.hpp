#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carnoq/config.hpp"

namespace carnoq {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double max_residual = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// Seeded invariant suites covering every module; exceptions inside a suite
// become failed entries rather than aborting the run.
std::vector<SuiteResult> run_invariant_suites(std::uint64_t seed,
                                              const Tolerances& tol = default_tolerances());

// The ten acceptance criteria, each with its pinned tolerance and runtime
// budget.
std::vector<SuiteResult> run_acceptance_criteria(std::uint64_t seed,
                                                 const Tolerances& tol = default_tolerances());

std::string format_report(const std::vector<SuiteResult>& results);
bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace carnoq
