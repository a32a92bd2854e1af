#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace anonroute {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::size_t workers = 0;
  std::ostream* log = nullptr;  // per-point tables and informational lines
};

/// closed-forms, pmf, tradeoff, er, oracle, floor, bounds, membership, all.
std::vector<std::string> acceptance_suites();

/// Runs a suite with its fixed seeds. Throws Errc::invalid_argument for an
/// unknown suite name.
std::vector<CriterionResult> run_acceptance(const std::string& suite,
                                            const AcceptanceOptions& options = {});

/// "[PASS] 3 <title>: <detail> (<seconds>s)"
std::string format_result(const CriterionResult& r);

}  // namespace anonroute
