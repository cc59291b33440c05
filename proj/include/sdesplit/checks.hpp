#pragma once

#include <string>
#include <vector>

namespace sdesplit {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // failure context, empty when passed
};

// Runs the library-wide invariant suite (decomposition identity, Lamperti
// pairs, semigroup law, inverse-flow pairs, coarsen-sum, NLL-density
// consistency, determinism). Designed to finish well under two minutes.
std::vector<CheckResult> run_invariant_checks();

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace sdesplit
