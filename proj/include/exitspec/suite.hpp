#ifndef EXITSPEC_SUITE_HPP
#define EXITSPEC_SUITE_HPP

#include <string>
#include <vector>

namespace exitspec {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;
    bool all_passed = false;
};

/// Runs the verification suite; `only` restricts to the listed criterion
/// ids (1-based), empty means all. Failures are captured per criterion,
/// never thrown.
SuiteResult run_verification_suite(const std::vector<int>& only = {});

/// One line per criterion: id, PASS/FAIL, name, time, metric summary.
std::string format_suite_report(const SuiteResult& result);

} // namespace exitspec

#endif
