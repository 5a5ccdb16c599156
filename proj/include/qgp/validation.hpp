// The acceptance suite shared by `qgp validate` and the test binary

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qgp::validation {

struct CheckResult {
    std::string id;      // "A1" .. "A10"
    std::string title;
    bool passed{};
    std::string detail;  // one line of measured numbers
    double seconds{};
};

struct SuiteOptions {
    int workers{0};                  // OpenMP team size for grid sweeps, 0 = default
    std::vector<std::string> only;   // ids to run; empty runs all
    unsigned long long seed{20240611};  // random draws of A4
};

inline constexpr int kCheckCount = 10;

// Runs the checks in id order, reporting each through `report` as soon as it
// finishes. Checks that share HEOM runs (A6/A8/A9 and A7/A8/A9) compute them once.
std::vector<CheckResult> run_suite(const SuiteOptions& options,
                                   const std::function<void(const CheckResult&)>& report = {});

std::string format_line(const CheckResult& r);

}  // namespace qgp::validation
