#pragma once

#include <string>
#include <vector>

namespace qkdlab {

// Self-check suites runnable from the CLI. Fault injection exists so the
// checks themselves can be shown to bite: each documented fault name must
// flip exactly its group to FAIL on an otherwise healthy build.
//
// Documented faults:
//   eq1-drop-uniform-term   bound check loses the 1/N term
//   lhl-drop-factor-2       tradeoff evaluated with a single log factor
//   parity-flip-sign        parity formula checked with the sign flipped
//   chain-reverse           stage monotonicity checked in reverse
struct VerifyOptions {
    int max_n = 6;              // cap on exhaustive key lengths
    std::string inject_fault;   // empty = stock behavior
};

struct GroupResult {
    std::string name;
    bool passed = false;
    long checks = 0;
    std::string failure_detail;  // first failing instance
};

std::vector<GroupResult> run_verify(const VerifyOptions& options);

bool all_passed(const std::vector<GroupResult>& results);

}  // namespace qkdlab
