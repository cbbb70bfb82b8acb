#include "bhscat/validate.hpp"

#include <ostream>

namespace bhscat::validate {

std::vector<CriterionResult> run_all(const Options& opt, std::ostream& log) {
  (void)opt;
  (void)log;
  return {};
}

}  // namespace bhscat::validate
