#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdc::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured values and thresholds, one line.
  std::string detail;
  double seconds = 0.0;
};

/// Ids of all acceptance criteria, 1..13.
std::vector<int> criterion_ids();
std::string criterion_name(int id);

/// Runs one criterion. Throws std::out_of_range for an unknown id.
/// Exceptions inside a check turn into a failed result.
CriterionResult run_criterion(int id, unsigned threads = 0);

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, unsigned threads = 0);

/// One line per criterion: "PASS  3 differences-identity  (0.8 s)  detail".
void print_result(std::ostream& os, const CriterionResult& r);

}  // namespace hdc::cli
