#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bhscat::validate {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string out_dir = "validate_out";
  int threads = 1;
  std::uint64_t seed = 20240917;
  bool heavy = true;  // include the long ensemble/inversion runs
};

/// Runs the acceptance criteria in order, printing one pass/fail line per
/// criterion to `log`. Returns all results.
std::vector<CriterionResult> run_all(const Options& opt, std::ostream& log);

}  // namespace bhscat::validate
