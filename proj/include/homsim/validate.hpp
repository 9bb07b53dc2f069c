#pragma once

#include <string>
#include <vector>

#include "homsim/experiment.hpp"

// Invariant and cross-model consistency checks, runnable as a batch from
// the CLI. Every check is deterministic (fixed seeds) so a failure is
// reproducible bit for bit.

namespace homsim::validate {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // measured value vs threshold, or failure context
};

// Runs every check reachable from the given base parameters. The
// closed-form agreement gate includes the base point itself, so feeding
// parameters outside the weak-transmittance regime (e.g. T = 0.5) is
// expected to fail that check.
std::vector<CheckResult> run_all(const experiment::ExperimentParams& base);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace homsim::validate
