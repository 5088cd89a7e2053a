#pragma once

#include <string>
#include <vector>

namespace skl {

// One numbered end-to-end check with its measured-vs-threshold summary.
struct CriterionResult {
    int id = 0;
    bool pass = false;
    std::string detail;
};

// Runs check 1..8; every tolerance is fixed here, not tunable from outside.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all_criteria();

}  // namespace skl
