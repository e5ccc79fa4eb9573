#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "diskperc/lattice.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/rng.hpp"

namespace diskperc {

/// Centred Gaussian field on D_n with covariance G = L^{-1}.
Eigen::VectorXd sample_dgff(const DirichletSolver& solver, CounterRng& rng);

VertexSet level_set(const Eigen::VectorXd& phi, double h);

/// P(length-1/2 standard Brownian bridge from a to b stays positive) = 1 - exp(-4ab).
double cable_open_probability(double a, double b);
/// P(Brownian bridge of unit duration from a to b stays above zero) = 1 - exp(-2ab).
double p_line(double a, double b);

struct CableLevelSet {
    double h = 0.0;
    VertexSet vertices;               // {phi >= h}
    std::vector<std::uint8_t> open;   // per interior edge: cable entirely >= h
};

/// Edge decoration given phi. One uniform per edge is drawn in edge order, so a
/// single call's uniforms can be reused across levels via cable_open_at.
CableLevelSet cable_open_edges(const LatticeDisk& lattice, const Eigen::VectorXd& phi, double h, CounterRng& rng);
std::vector<double> edge_uniforms(const LatticeDisk& lattice, CounterRng& rng);
CableLevelSet cable_open_at(const LatticeDisk& lattice, const Eigen::VectorXd& phi, double h,
                            const std::vector<double>& uniforms);

/// Fine-step Brownian-bridge oracle for the open probability (exact per substep crossing law).
struct BridgeOracle {
    double p_open = 0.0;
    double stderr_p = 0.0;
};
BridgeOracle bridge_open_mc(double a, double b, int substeps, std::int64_t reps, std::uint64_t seed);

double exploration_martingale(const EquilibriumMeasure& eK, const Eigen::VectorXd& phi);
double exploration_martingale(const DirichletSolver& solver, const VertexSet& K, const Eigen::VectorXd& phi);
/// e^T G e, which equals cap(K) by the last-exit identity.
double martingale_variance(const DirichletSolver& solver, const EquilibriumMeasure& eK);

struct ExplorationStep {
    int explored = 0;
    double martingale = 0.0;
    double capacity = 0.0;
};

struct ExplorationState {
    VertexSet explored;
    std::vector<ExplorationStep> steps;  // one record per breadth-first layer, starting with B_n(r)
    bool reached_boundary = false;
};

/// Breadth-first growth from B_n(r): every frontier vertex joins K, but growth
/// continues only through vertices with phi >= h. Stops when no active vertex
/// remains or an active vertex is adjacent to the outer boundary.
ExplorationState explore(const Eigen::VectorXd& phi, double h, const DirichletSolver& solver, double r);

struct DominationResult {
    double p_gff = 0.0;
    double p_vacant = 0.0;
    double margin = 0.0;       // p_gff - p_vacant
    double margin_stderr = 0.0;
    std::int64_t reps = 0;
};

/// Crossing B_n(r) <-> {|x| >= 1-eps} in the cable level set {phi >= sqrt(2u)} versus the
/// trace-level vacant set of excursions at u plus loop clusters at lambda = 1/2.
DominationResult isomorphism_domination(double u, int n, double r, double eps, std::int64_t reps, std::uint64_t seed);

/// Cable sign clusters of phi (same-sign edges open with probability 1 - exp(-4 phi_x phi_y)).
/// Returns a cluster id per vertex.
std::vector<int> cable_sign_clusters(const LatticeDisk& lattice, const Eigen::VectorXd& phi, CounterRng& rng);

}  // namespace diskperc
