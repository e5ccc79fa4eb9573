#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "diskperc/parallel.hpp"

namespace diskperc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;   // human-readable numbers
    std::string digest;    // full-precision numbers, compared for determinism
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20241017;
    Execution mode = Execution::Parallel;
    double scale = 1.0;      // multiplies replica counts (floored at a small minimum)
    std::vector<int> only;   // empty = all criteria
};

inline constexpr int kCriterionCount = 15;

CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// Runs the selected criteria in order; `on_result` is called after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [ 3] capacity convergence: ..." line.
std::string format_result(const CriterionResult& r);

}  // namespace diskperc
