#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diskperc/lattice.hpp"
#include "diskperc/parallel.hpp"
#include "diskperc/stats.hpp"

namespace diskperc {

/// True iff a nearest-neighbour path inside `open` joins A to B.
bool connected(const LatticeDisk& lattice, const VertexSet& open, const VertexSet& A, const VertexSet& B);
/// Same with an explicit per-interior-edge open flag (cable connectivity).
bool connected_edges(const LatticeDisk& lattice, const VertexSet& open, const std::vector<std::uint8_t>& edge_open,
                     const VertexSet& A, const VertexSet& B);

enum class Model { VacantExcursion, VacantLoops, GffLevel, CableGffLevel };
enum class Target { OuterBall, InnerBoundary, BoundaryLayer };

std::string to_string(Model m);
std::string to_string(Target t);
Model parse_model(const std::string& s);
Target parse_target(const std::string& s);

struct CrossingSpec {
    Model model = Model::VacantExcursion;
    Target target = Target::OuterBall;
    double r = 0.3;
    double eps = 0.1;
    double lambda = 0.5;   // loops model only
};

/// Vertices the crossing must reach for this spec at mesh n.
VertexSet crossing_target(const LatticeDisk& lattice, const CrossingSpec& spec);

struct Estimate {
    double p_hat = 0.0;
    double stderr_p = 0.0;
    std::int64_t successes = 0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
};
Estimate make_estimate(std::int64_t successes, std::int64_t reps, std::uint64_t seed);

/// Crossing events for a whole parameter grid, coupled per replica (thinning for u,
/// one field for h). Result[k][j] is replica k's event at params[j].
std::vector<std::vector<std::uint8_t>> crossing_events(const CrossingSpec& spec, int n,
                                                       const std::vector<double>& params, std::int64_t reps,
                                                       std::uint64_t seed, Execution mode = Execution::Parallel);

Estimate crossing_probability(const CrossingSpec& spec, int n, double param, std::int64_t reps, std::uint64_t seed,
                              Execution mode = Execution::Parallel);

struct SweepPoint {
    int n = 0;
    double param = 0.0;
    Estimate estimate;
    stats::Interval wilson;
};

struct SweepFit {
    int n = 0;
    stats::LogisticFit fit;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<SweepFit> fits;
};

SweepResult threshold_sweep(const CrossingSpec& spec, const std::vector<double>& params, const std::vector<int>& ns,
                            std::int64_t reps, std::uint64_t seed, Execution mode = Execution::Parallel);

}  // namespace diskperc
