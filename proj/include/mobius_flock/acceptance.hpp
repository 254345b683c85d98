#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mobius_flock {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  bool quick = false;  // skip the long closed-loop runs (criteria 4, 5, 6, 8)
  std::optional<double> kappa1;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::vector<int> only;  // empty = all
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* progress = nullptr);
void print_results(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace mobius_flock
