#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diskperc/lattice.hpp"
#include "diskperc/parallel.hpp"
#include "diskperc/rng.hpp"

namespace diskperc {

/// 1D walk Y (steps +-1) and standard Brownian motion B sampled at integer times 0..horizon.
struct PairedPath {
    std::vector<double> B;
    std::vector<int> Y;
    double deviation() const;  // max_k |B_k - Y_k|
};

enum class CouplingMethod { Dyadic, Skorokhod };

/// Dyadic (KMT-style) coupling: quantile-couple the endpoint, then recursively the
/// midpoint of every dyadic interval (hypergeometric for the walk, Gaussian bridge for B).
PairedPath dyadic_coupling_1d(std::int64_t horizon, CounterRng& rng);
/// Skorokhod embedding: the walk steps whenever B moves one unit away from it.
/// Inferior rate, kept for comparison.
PairedPath skorokhod_coupling_1d(std::int64_t horizon, CounterRng& rng, double substep = 0.01);
PairedPath coupling_1d(std::int64_t horizon, CounterRng& rng, CouplingMethod method);

/// Smallest s with P(S <= s) >= u for S ~ Binomial(n, 1/2).
std::int64_t binomial_half_quantile(std::int64_t n, double u);
/// Same for the number of successes among `draws` picks without replacement from
/// `total` items of which `good` are successes.
std::int64_t hypergeometric_quantile(std::int64_t total, std::int64_t good, std::int64_t draws, double u);

/// Planar pair on the rescaled clock: walk X on (1/n)Z^2 and Z = B/(sqrt2 n), both killed on
/// leaving the unit disk. Index k corresponds to time k / (2 n^2).
struct PlanarPair {
    int n = 0;
    std::vector<Point> walk;
    std::vector<Point> brownian;
    std::int64_t walk_exit = -1;      // first index with |X| >= 1
    std::int64_t brownian_exit = -1;  // first index with |Z| >= 1
    double sup_deviation = 0.0;       // over indices before either exit
};

PlanarPair kmt_2d(int n, CounterRng& rng, Site walk_start = {0, 0}, Point brownian_start = {0.0, 0.0},
                  bool keep_paths = true);

struct LastExitSample {
    double gap = 0.0;            // |X_{L} - Z_{L}|
    double continuum_angle = 0.0;
    bool valid = false;
};
LastExitSample last_exit_sample(double r, int n, CounterRng& rng);

struct LastExitReport {
    std::vector<double> s_values;
    std::vector<double> exceedance;   // P(gap > s log n / n)
    std::vector<double> angles;       // continuum last-exit angles
    std::vector<double> gaps;
};
LastExitReport last_exit_gap(double r, int n, std::int64_t reps, std::uint64_t seed, const std::vector<double>& s_values,
                             Execution mode = Execution::Parallel);

struct CapacityCurveRow {
    std::string shape;
    int n = 0;
    double cap_discrete = 0.0;
    double cap_reference = 0.0;  // NaN when no closed form
    double error = 0.0;
};

/// Continuum capacity of the segment [a, b] of the real axis (Grötzsch ring modulus).
double continuum_cap_segment(double a, double b);
/// Lattice points (i/n, 0) with a <= i/n <= b.
VertexSet segment_vertices(const LatticeDisk& lattice, double a, double b);

std::vector<CapacityCurveRow> capacity_convergence_general(const std::string& shape, const std::vector<int>& ns,
                                                           double a = 0.2, double b = 0.8);

struct BeurlingResult {
    std::vector<double> distances;
    std::vector<double> escape;  // P(reach distance R before hitting A)
    std::vector<double> stderr_escape;
    double exponent = 0.0;
    double r2 = 0.0;
};

/// A = segment from the origin to (-length, 0); walks start at (d, 0) beyond its tip.
BeurlingResult beurling_check(int n, double R, const std::vector<int>& d_lattice, std::int64_t reps,
                              std::uint64_t seed, double length = 0.6, Execution mode = Execution::Parallel);

struct ExcursionMatchReport {
    std::int64_t reps = 0;
    double count_mismatch_rate = 0.0;     // replicas where the coupled Poisson counts differ
    std::vector<double> start_distance;   // matched start points
    std::vector<double> path_deviation;   // sup distance of matched forward parts
};

/// Continuum and lattice forward excursions from B(r), paired by a quantile coupling of
/// counts and of start angles, then run under kmt_2d.
ExcursionMatchReport excursion_match(double u, double r, int n, std::int64_t reps, std::uint64_t seed,
                                     Execution mode = Execution::Parallel);

}  // namespace diskperc
