#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

#include "diskperc/rng.hpp"

namespace diskperc {

enum class Execution { Serial, Parallel };

/// Process-wide worker count used by the parallel replica kernels.
/// Zero means the OpenMP default.
void set_worker_count(int workers);
int worker_count();

/// Runs `body(replica, rng)` for replica = 0..reps-1 and returns the results
/// in replica order. Replica k always receives CounterRng(seed, k), so the
/// output is identical for every worker count and for both execution modes.
template <class Result, class Body>
std::vector<Result> run_replicas(std::int64_t reps, std::uint64_t seed, Body&& body,
                                 Execution mode = Execution::Parallel) {
    std::vector<Result> out(reps > 0 ? static_cast<std::size_t>(reps) : 0);
    if (mode == Execution::Serial) {
        for (std::int64_t k = 0; k < reps; ++k) {
            CounterRng rng(seed, static_cast<std::uint64_t>(k));
            out[static_cast<std::size_t>(k)] = body(k, rng);
        }
        return out;
    }
    const int workers = worker_count();
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t k = 0; k < reps; ++k) {
        try {
            CounterRng rng(seed, static_cast<std::uint64_t>(k));
            out[static_cast<std::size_t>(k)] = body(k, rng);
        } catch (...) {
#pragma omp critical(diskperc_replica_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace diskperc
