#include "diskperc/potential.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace diskperc {

SpMat dirichlet_laplacian(const LatticeDisk& lattice, const VertexSet* keep, std::vector<int>* index_of) {
    const int N = lattice.vertex_count();
    std::vector<int> local(static_cast<std::size_t>(N), -1);
    int m = 0;
    for (int v = 0; v < N; ++v)
        if (!keep || keep->contains(v)) local[static_cast<std::size_t>(v)] = m++;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(m) * 5);
    for (int v = 0; v < N; ++v) {
        const int a = local[static_cast<std::size_t>(v)];
        if (a < 0) continue;
        trips.emplace_back(a, a, 4.0);
        for (NeighbourCode c : lattice.neighbours(v)) {
            if (is_boundary_code(c)) continue;
            const int b = local[static_cast<std::size_t>(c)];
            if (b >= 0) trips.emplace_back(a, b, -1.0);
        }
    }
    SpMat L(m, m);
    L.setFromTriplets(trips.begin(), trips.end());
    L.makeCompressed();
    if (index_of) *index_of = std::move(local);
    return L;
}

struct DirichletSolver::Impl {
    SpMat L;
    std::unique_ptr<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>> llt;
    std::unique_ptr<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>> cg;
};

DirichletSolver::DirichletSolver(const LatticeDisk& lattice, SolverOptions options)
    : lattice_(lattice), options_(options), impl_(std::make_unique<Impl>()) {
    impl_->L = dirichlet_laplacian(lattice);
    if (lattice.vertex_count() <= options_.direct_limit) {
        impl_->llt = std::make_unique<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>>(impl_->L);
        if (impl_->llt->info() != Eigen::Success) throw std::runtime_error("DirichletSolver: factorization failed");
    } else {
        impl_->cg = std::make_unique<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>>();
        impl_->cg->setTolerance(options_.cg_tolerance);
        impl_->cg->compute(impl_->L);
    }
}

DirichletSolver::~DirichletSolver() = default;

bool DirichletSolver::iterative() const noexcept { return impl_->cg != nullptr; }

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& rhs) const {
    if (impl_->llt) return impl_->llt->solve(rhs);
    Eigen::VectorXd x = impl_->cg->solve(rhs);
    if (impl_->cg->info() != Eigen::Success) throw std::runtime_error("DirichletSolver: CG did not converge");
    return x;
}

std::shared_ptr<const Eigen::VectorXd> DirichletSolver::green_column(int y) const {
    if (y < 0 || y >= lattice_.vertex_count()) throw std::out_of_range("green_column: not a vertex of D_n");
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(y); it != cache_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
    }
    Eigen::VectorXd e = Eigen::VectorXd::Zero(lattice_.vertex_count());
    e[y] = 1.0;
    auto col = std::make_shared<const Eigen::VectorXd>(solve(e));

    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(y); it != cache_.end()) return it->second.first;
    if (options_.cache_columns == 0) return col;
    while (cache_.size() >= options_.cache_columns) {
        cache_.erase(lru_.back());
        lru_.pop_back();
    }
    lru_.push_front(y);
    cache_.emplace(y, std::make_pair(col, lru_.begin()));
    return col;
}

double DirichletSolver::green(int x, int y) const {
    if (x < 0 || x >= lattice_.vertex_count()) throw std::out_of_range("green: not a vertex of D_n");
    return (*green_column(y))[x];
}

Eigen::VectorXd DirichletSolver::correlate(const Eigen::VectorXd& white) const {
    if (!impl_->llt) throw std::logic_error("correlate: needs the direct factorization");
    // P A P^T = L L^T, so P^T L^{-T} z has covariance A^{-1}.
    Eigen::VectorXd y = impl_->llt->matrixU().solve(white);
    return impl_->llt->permutationPinv() * y;
}

namespace {

EquilibriumMeasure finish(const LatticeDisk& lattice, Eigen::VectorXd weight) {
    EquilibriumMeasure out;
    for (int v = 0; v < lattice.vertex_count(); ++v) {
        if (weight[v] > 0.0) {
            out.support.push_back(v);
            out.capacity += weight[v];
        }
    }
    out.weight = std::move(weight);
    return out;
}

}  // namespace

EquilibriumMeasure equilibrium_measure(const DirichletSolver& solver, const VertexSet& K) {
    const LatticeDisk& lat = solver.lattice();
    if (K.size() != lat.vertex_count()) throw std::invalid_argument("equilibrium_measure: lattice mismatch");
    if (K.empty()) throw std::invalid_argument("equilibrium_measure: K is empty");

    // h = P(reach the outer boundary before K) on the complement.
    const VertexSet rest = K.complement();
    std::vector<int> local;
    const SpMat Lr = dirichlet_laplacian(lat, &rest, &local);
    Eigen::VectorXd h;
    if (Lr.rows() > 0) {
        Eigen::VectorXd b(Lr.rows());
        for (int v = 0; v < lat.vertex_count(); ++v)
            if (local[static_cast<std::size_t>(v)] >= 0) b[local[static_cast<std::size_t>(v)]] = lat.boundary_degree(v);
        if (Lr.rows() <= solver.options().direct_limit) {
            Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt(Lr);
            if (llt.info() != Eigen::Success) throw std::runtime_error("equilibrium_measure: factorization failed");
            h = llt.solve(b);
        } else {
            Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
            cg.setTolerance(solver.options().cg_tolerance);
            h = cg.compute(Lr).solve(b);
        }
    }

    Eigen::VectorXd weight = Eigen::VectorXd::Zero(lat.vertex_count());
    for (int x : K.indices()) {
        double w = 0.0;
        for (NeighbourCode c : lat.neighbours(x)) {
            if (is_boundary_code(c)) {
                w += 1.0;
            } else if (!K.contains(c)) {
                w += h[local[static_cast<std::size_t>(c)]];
            }
        }
        weight[x] = w;
    }
    return finish(lat, std::move(weight));
}

EquilibriumMeasure equilibrium_measure_dense(const DirichletSolver& solver, const VertexSet& K) {
    const LatticeDisk& lat = solver.lattice();
    if (K.empty()) throw std::invalid_argument("equilibrium_measure_dense: K is empty");
    const std::vector<int> idx = K.indices();
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd G(k, k);
    for (Eigen::Index b = 0; b < k; ++b) {
        const auto col = solver.green_column(idx[static_cast<std::size_t>(b)]);
        for (Eigen::Index a = 0; a < k; ++a) G(a, b) = (*col)[idx[static_cast<std::size_t>(a)]];
    }
    const Eigen::VectorXd e = G.llt().solve(Eigen::VectorXd::Ones(k));
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(lat.vertex_count());
    for (Eigen::Index a = 0; a < k; ++a) {
        // interior points of K carry zero weight up to round-off
        weight[idx[static_cast<std::size_t>(a)]] = std::abs(e[a]) < 1e-11 ? 0.0 : e[a];
    }
    return finish(lat, std::move(weight));
}

double capacity(const DirichletSolver& solver, const VertexSet& K) {
    return equilibrium_measure(solver, K).capacity;
}

VertexSet inner_boundary_of(const LatticeDisk& lattice, const VertexSet& K) {
    VertexSet out = lattice.none();
    for (int x : K.indices()) {
        for (NeighbourCode c : lattice.neighbours(x)) {
            if (is_boundary_code(c) || !K.contains(c)) {
                out.insert(x);
                break;
            }
        }
    }
    return out;
}

double es_statistic(const DirichletSolver& solver, const VertexSet& K) {
    const LatticeDisk& lat = solver.lattice();
    VertexSet core = K;
    for (int x : inner_boundary_of(lat, K).indices()) core.erase(x);
    if (core.empty()) return 0.0;
    const EquilibriumMeasure ec = equilibrium_measure(solver, core);
    return ec.weight.maxCoeff() / capacity(solver, K);
}

Eigen::VectorXd last_exit_distribution(const DirichletSolver& solver, const EquilibriumMeasure& e, int x) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(solver.lattice().vertex_count());
    const auto col = solver.green_column(x);  // symmetric: G(x,y) = G(y,x)
    for (int y : e.support) out[y] = (*col)[y] * e.weight[y];
    return out;
}

std::vector<double> exit_distribution(const DirichletSolver& solver, int x) {
    const auto col = solver.green_column(x);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(solver.lattice().boundary_edge_count()));
    for (const BoundaryEdge& be : solver.lattice().boundary_edges()) out.push_back((*col)[be.vertex]);
    return out;
}

double continuum_green(Point w, Point z) {
    const std::complex<double> a(w.x, w.y);
    const std::complex<double> b(z.x, z.y);
    if (std::abs(a) >= 1.0 || std::abs(b) >= 1.0) throw std::domain_error("continuum_green: points must lie in the open disk");
    if (a == b) return std::numeric_limits<double>::infinity();
    return std::log(std::abs(1.0 - std::conj(a) * b) / std::abs(a - b)) / (2.0 * std::numbers::pi);
}

double continuum_cap_ball(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("continuum_cap_ball: need 0 < r < 1");
    return 2.0 * std::numbers::pi / std::log(1.0 / r);
}

double continuum_annulus_hit(double abs_x, double r, double R) {
    if (!(r > 0.0 && r < R && abs_x >= r && abs_x <= R))
        throw std::domain_error("continuum_annulus_hit: need 0 < r <= |x| <= R, r < R");
    return std::log(R / abs_x) / std::log(R / r);
}

std::vector<CapacityRow> capacity_convergence_ball(double r, const std::vector<int>& ns) {
    std::vector<CapacityRow> rows;
    const double exact = continuum_cap_ball(r);
    for (int n : ns) {
        const LatticeDisk lat(n);
        const DirichletSolver solver(lat, {.cache_columns = 0});
        const double c = capacity(solver, ball_vertices(lat, {0.0, 0.0}, r));
        rows.push_back({n, c, exact, std::abs(c - exact)});
    }
    return rows;
}

}  // namespace diskperc
