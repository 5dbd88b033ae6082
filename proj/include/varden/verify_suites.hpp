#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace varden {

// Property batteries shared by the command-line `verify` command and the
// acceptance runner. Each case records a residual against its tolerance;
// a suite passes when every case does.

struct SuiteCase {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteCase> cases;
    bool all_pass = true;
};

std::vector<std::string> suite_names();  // moreau, hj, asymptotic, bregman, duality

// seed 0 is the fixed battery used for acceptance
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 0);

std::string suite_csv(const SuiteResult& r);

}  // namespace varden
