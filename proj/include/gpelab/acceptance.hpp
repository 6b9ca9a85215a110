#pragma once

#include <string>
#include <vector>

namespace gpelab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double runtime_s = 0.0;
  std::string detail;
};

/// Runs the acceptance criteria (all when only_id == 0, a single one
/// otherwise).  Each result carries the measured quantities in `detail`.
std::vector<CriterionResult> run_acceptance(int only_id = 0, int threads = 1);

}  // namespace gpelab
