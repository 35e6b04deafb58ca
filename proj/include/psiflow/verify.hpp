#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace psiflow {

struct VerifyRow {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

// Suites: "collapse-times" (1,3,4,5), "limit-circles" (2,6),
// "invariants" (7,8,9,10,11), "refinement" (12), "all".
// Throws Error for an unknown suite name.
std::vector<VerifyRow> run_verify_suite(const std::string& suite,
                                        std::ostream& progress);

void print_verify_table(std::ostream& os, const std::vector<VerifyRow>& rows);

bool all_pass(const std::vector<VerifyRow>& rows);

}  // namespace psiflow
