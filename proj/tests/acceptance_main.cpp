#include "exitspec/suite.hpp"

#include <cstdio>

int main() {
    auto result = exitspec::run_verification_suite();
    std::fputs(exitspec::format_suite_report(result).c_str(), stdout);
    return result.all_passed ? 0 : 1;
}
