#pragma once

#include <string>
#include <vector>

namespace ftag {

struct AcceptanceOptions {
    std::string fixtures_dir = "tests/fixtures";
    std::string filter;  // substring of the criterion name; empty runs all
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // expected vs observed summary
    double seconds = 0.0;
};

// Runs the acceptance checks (all of them, or those whose name contains
// the filter). Each result carries a one-line expected/observed summary.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

}  // namespace ftag
