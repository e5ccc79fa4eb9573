#pragma once

#include <cstdint>
#include <vector>

#include "diskperc/lattice.hpp"
#include "diskperc/rng.hpp"
#include "diskperc/union_find.hpp"

namespace diskperc {

struct DiscreteLoop {
    std::vector<int> vertices;  // l_0 .. l_{m-1}; the step l_{m-1} -> l_0 closes the loop
    int base = -1;              // first vertex of the loop in peel order
    int length() const noexcept { return static_cast<int>(vertices.size()); }
};

struct LoopSoupSample {
    double lambda = 0.0;
    std::vector<DiscreteLoop> loops;
    std::vector<int> cluster;   // per vertex: cluster id (representative), -1 if no loop visits it

    /// Sizes (vertex counts) of all loop clusters.
    std::vector<int> cluster_sizes() const;
};

enum class PeelOrder { NestedDissection, RowMajor };

/// Precomputed peel order and return probabilities for one lattice; shared by replicas.
class LoopSoupPlan {
public:
    LoopSoupPlan(const LatticeDisk& lattice, PeelOrder order = PeelOrder::NestedDissection);

    const LatticeDisk& lattice() const noexcept { return lattice_; }
    /// Vertices in peel order x_1, x_2, ...
    const std::vector<int>& peel_order() const noexcept { return peel_; }
    /// r(x) = P_x(return to x before leaving H(x)), H(x) = vertices not peeled before x.
    double return_probability(int v) const noexcept { return r_[static_cast<std::size_t>(v)]; }
    /// Position of v in peel order.
    int rank(int v) const noexcept { return rank_[static_cast<std::size_t>(v)]; }

private:
    const LatticeDisk& lattice_;
    std::vector<int> peel_;
    std::vector<int> rank_;
    std::vector<double> r_;
};

/// Vertex-peeling sampler of the random-walk loop soup at intensity lambda.
LoopSoupSample sample_loop_soup(const LoopSoupPlan& plan, double lambda, CounterRng& rng);

struct LoopOracleResult {
    LoopSoupSample sample;
    double truncated_mass = 0.0;   // expected loops longer than max_len
    double retained_mass = 0.0;    // expected loops with length <= max_len
};

/// Reference sampler: for every root x and even length m <= max_len, Poisson(lambda q_m(x,x)/m)
/// rooted loops drawn by rejection, then rotated uniformly. Tiny lattices only.
LoopOracleResult loop_rejection_oracle(const LatticeDisk& lattice, double lambda, int max_len, CounterRng& rng);

/// Expected number of rooted-at-x loops of each length (index m), using killed return probabilities.
std::vector<double> loop_length_mass(const LatticeDisk& lattice, double lambda, int max_len);

/// Excursion trace plus every loop cluster touching it.
VertexSet combined_occupied(const LatticeDisk& lattice, const VertexSet& excursion_trace, const LoopSoupSample& soup);

/// Elimination order by recursive coordinate bisection with separators last.
std::vector<int> nested_dissection_order(const LatticeDisk& lattice);

}  // namespace diskperc
