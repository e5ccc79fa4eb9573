#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "diskperc/lattice.hpp"

namespace diskperc {

using SpMat = Eigen::SparseMatrix<double>;

/// L = 4I - A on D_n, restricted to the vertices where `keep` holds (all if empty).
/// `index_of` maps lattice vertex -> row (or -1) when provided.
SpMat dirichlet_laplacian(const LatticeDisk& lattice, const VertexSet* keep = nullptr,
                          std::vector<int>* index_of = nullptr);

struct SolverOptions {
    int direct_limit = 400000;   // above this many unknowns use conjugate gradient
    double cg_tolerance = 1e-12;
    std::size_t cache_columns = 256;
};

/// Factorized Dirichlet Laplacian of one lattice disk. G = L^{-1}.
class DirichletSolver {
public:
    explicit DirichletSolver(const LatticeDisk& lattice, SolverOptions options = {});
    ~DirichletSolver();
    DirichletSolver(const DirichletSolver&) = delete;
    DirichletSolver& operator=(const DirichletSolver&) = delete;

    const LatticeDisk& lattice() const noexcept { return lattice_; }
    bool iterative() const noexcept;
    const SolverOptions& options() const noexcept { return options_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    /// Column G(., y); cached with LRU eviction, safe for concurrent callers.
    std::shared_ptr<const Eigen::VectorXd> green_column(int y) const;
    double green(int x, int y) const;

    /// L^{-1/2}-type sampling factor: returns phi with Cov(phi) = G for white noise z.
    Eigen::VectorXd correlate(const Eigen::VectorXd& white) const;

private:
    struct Impl;
    const LatticeDisk& lattice_;
    SolverOptions options_;
    std::unique_ptr<Impl> impl_;

    mutable std::mutex cache_mutex_;
    mutable std::list<int> lru_;
    mutable std::unordered_map<int, std::pair<std::shared_ptr<const Eigen::VectorXd>, std::list<int>::iterator>> cache_;
};

struct EquilibriumMeasure {
    Eigen::VectorXd weight;      // indexed by vertex, zero off the support
    std::vector<int> support;    // vertices with positive weight
    double capacity = 0.0;
};

/// Escape-weighted measure e_K(x) = 4 P_x(exit D_n before returning to K).
/// One harmonic solve on D_n \ K with a fresh reduced factorization.
EquilibriumMeasure equilibrium_measure(const DirichletSolver& solver, const VertexSet& K);

/// Same measure via e_K = G_KK^{-1} 1 on K (dense, small K only).
EquilibriumMeasure equilibrium_measure_dense(const DirichletSolver& solver, const VertexSet& K);

double capacity(const DirichletSolver& solver, const VertexSet& K);

/// Vertices of K with a neighbour (in D_n or on the outer boundary) outside K.
VertexSet inner_boundary_of(const LatticeDisk& lattice, const VertexSet& K);

/// sup of e_{K'} over the inner boundary of K' = K minus its inner boundary,
/// divided by cap(K); zero when K' is empty.
double es_statistic(const DirichletSolver& solver, const VertexSet& K);

/// P_x(X at the last visit to K equals y) = G(x,y) e_K(y), indexed by vertex.
Eigen::VectorXd last_exit_distribution(const DirichletSolver& solver, const EquilibriumMeasure& e, int x);

/// Exit law from x over the boundary-edge list: P(exit through edge b) = G(x, vertex(b)).
std::vector<double> exit_distribution(const DirichletSolver& solver, int x);

// Continuum closed forms on the unit disk.

/// Dirichlet Green function; +infinity when w == z.
double continuum_green(Point w, Point z);
double continuum_cap_ball(double r);
/// P_x(hit B(r) before leaving B(R)) for r <= |x| <= R.
double continuum_annulus_hit(double abs_x, double r, double R);

struct CapacityRow {
    int n = 0;
    double cap_discrete = 0.0;
    double cap_continuum = 0.0;
    double error = 0.0;
};

/// Discrete capacity of B_n(r) against 2 pi / log(1/r) across n.
std::vector<CapacityRow> capacity_convergence_ball(double r, const std::vector<int>& ns);

}  // namespace diskperc
