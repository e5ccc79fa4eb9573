#include "diskperc/gff.hpp"

#include <cmath>
#include <stdexcept>

#include "diskperc/excursions.hpp"
#include "diskperc/loopsoup.hpp"
#include "diskperc/parallel.hpp"
#include "diskperc/percolation.hpp"
#include "diskperc/union_find.hpp"

namespace diskperc {

Eigen::VectorXd sample_dgff(const DirichletSolver& solver, CounterRng& rng) {
    Eigen::VectorXd z(solver.lattice().vertex_count());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
    return solver.correlate(z);
}

VertexSet level_set(const Eigen::VectorXd& phi, double h) {
    VertexSet out(static_cast<int>(phi.size()));
    for (Eigen::Index v = 0; v < phi.size(); ++v)
        if (phi[v] >= h) out.insert(static_cast<int>(v));
    return out;
}

double cable_open_probability(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return -std::expm1(-4.0 * a * b);
}

double p_line(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return -std::expm1(-2.0 * a * b);
}

std::vector<double> edge_uniforms(const LatticeDisk& lattice, CounterRng& rng) {
    std::vector<double> u(static_cast<std::size_t>(lattice.interior_edge_count()));
    for (auto& x : u) x = rng.uniform();
    return u;
}

CableLevelSet cable_open_at(const LatticeDisk& lattice, const Eigen::VectorXd& phi, double h,
                            const std::vector<double>& uniforms) {
    CableLevelSet out;
    out.h = h;
    out.vertices = level_set(phi, h);
    const auto edges = lattice.interior_edges();
    out.open.assign(edges.size(), 0);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [x, y] = edges[k];
        out.open[k] = uniforms[k] < cable_open_probability(phi[x] - h, phi[y] - h) ? 1 : 0;
    }
    return out;
}

CableLevelSet cable_open_edges(const LatticeDisk& lattice, const Eigen::VectorXd& phi, double h, CounterRng& rng) {
    return cable_open_at(lattice, phi, h, edge_uniforms(lattice, rng));
}

BridgeOracle bridge_open_mc(double a, double b, int substeps, std::int64_t reps, std::uint64_t seed) {
    if (substeps < 1 || reps < 1) throw std::invalid_argument("bridge_open_mc: need substeps >= 1 and reps >= 1");
    constexpr double T = 0.5;
    const double dt = T / substeps;
    constexpr std::int64_t chunk = 10000;
    const std::int64_t chunks = (reps + chunk - 1) / chunk;
    const auto counts = run_replicas<std::int64_t>(chunks, seed, [&](std::int64_t c, CounterRng& rng) {
        const std::int64_t m = std::min(chunk, reps - c * chunk);
        std::int64_t open = 0;
        for (std::int64_t k = 0; k < m; ++k) {
            double x = a;
            bool alive = x > 0.0;
            for (int s = 0; s < substeps && alive; ++s) {
                const double left = T - s * dt;
                double y = b;
                if (s + 1 < substeps) {
                    const double mean = x + (b - x) * dt / left;
                    const double var = dt * (left - dt) / left;
                    y = mean + std::sqrt(var) * rng.normal();
                }
                // Given both ends of a substep above 0, the bridge dips below 0
                // with probability exp(-2xy/dt).
                if (y <= 0.0 || rng.uniform() < std::exp(-2.0 * x * y / dt)) alive = false;
                x = y;
            }
            open += alive ? 1 : 0;
        }
        return open;
    });
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    BridgeOracle out;
    out.p_open = static_cast<double>(total) / static_cast<double>(reps);
    out.stderr_p = std::sqrt(out.p_open * (1 - out.p_open) / static_cast<double>(reps));
    return out;
}

double exploration_martingale(const EquilibriumMeasure& eK, const Eigen::VectorXd& phi) {
    double m = 0.0;
    for (int x : eK.support) m += eK.weight[x] * phi[x];
    return m;
}

double exploration_martingale(const DirichletSolver& solver, const VertexSet& K, const Eigen::VectorXd& phi) {
    return exploration_martingale(equilibrium_measure(solver, K), phi);
}

double martingale_variance(const DirichletSolver& solver, const EquilibriumMeasure& eK) {
    return eK.weight.dot(solver.solve(eK.weight));
}

ExplorationState explore(const Eigen::VectorXd& phi, double h, const DirichletSolver& solver, double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("explore: need 0 < r < 1");
    const LatticeDisk& lat = solver.lattice();
    ExplorationState st;
    st.explored = ball_vertices(lat, {0.0, 0.0}, r);
    std::vector<int> active = st.explored.indices();

    auto record = [&] {
        const EquilibriumMeasure e = equilibrium_measure(solver, st.explored);
        st.steps.push_back({st.explored.count(), exploration_martingale(e, phi), e.capacity});
    };
    auto touches_boundary = [&](const std::vector<int>& vs) {
        for (int v : vs)
            if (lat.is_inner_boundary(v)) return true;
        return false;
    };

    record();
    st.reached_boundary = touches_boundary(active);
    while (!active.empty() && !st.reached_boundary) {
        std::vector<int> added;
        for (int v : active) {
            for (NeighbourCode c : lat.neighbours(v)) {
                if (is_boundary_code(c) || st.explored.contains(c)) continue;
                st.explored.insert(c);
                added.push_back(c);
            }
        }
        if (added.empty()) break;
        record();
        active.clear();
        for (int v : added)
            if (phi[v] >= h) active.push_back(v);
        st.reached_boundary = touches_boundary(active);
    }
    return st;
}

DominationResult isomorphism_domination(double u, int n, double r, double eps, std::int64_t reps, std::uint64_t seed) {
    if (!(u > 0.0)) throw std::invalid_argument("isomorphism_domination: u must be > 0");
    const LatticeDisk lat(n);
    const DirichletSolver solver(lat, {.cache_columns = 0});
    const LoopSoupPlan plan(lat);
    const CrossingSpec spec{Model::CableGffLevel, Target::OuterBall, r, eps, 0.5};
    const VertexSet inner = ball_vertices(lat, {0.0, 0.0}, r);
    const VertexSet outer = crossing_target(lat, spec);
    const double h = std::sqrt(2.0 * u);

    struct Pair {
        std::uint8_t gff = 0, vacant = 0;
    };
    const auto res = run_replicas<Pair>(reps, seed, [&](std::int64_t, CounterRng& rng) {
        CounterRng field_rng = rng.split(1), edge_rng = rng.split(2), cloud_rng = rng.split(3), soup_rng = rng.split(4);
        const Eigen::VectorXd phi = sample_dgff(solver, field_rng);
        const CableLevelSet cable = cable_open_edges(lat, phi, h, edge_rng);
        Pair p;
        p.gff = connected_edges(lat, cable.vertices, cable.open, inner, outer) ? 1 : 0;
        const ExcursionCloud cloud = sample_cloud_direct(lat, u, cloud_rng);
        const LoopSoupSample soup = sample_loop_soup(plan, 0.5, soup_rng);
        const VertexSet vacant = combined_occupied(lat, cloud.occupied(), soup).complement();
        p.vacant = connected(lat, vacant, inner, outer) ? 1 : 0;
        return p;
    });
    std::int64_t g = 0, v = 0;
    for (const auto& p : res) {
        g += p.gff;
        v += p.vacant;
    }
    DominationResult out;
    out.reps = reps;
    if (reps <= 0) return out;
    const double R = static_cast<double>(reps);
    out.p_gff = static_cast<double>(g) / R;
    out.p_vacant = static_cast<double>(v) / R;
    out.margin = out.p_gff - out.p_vacant;
    out.margin_stderr = std::sqrt(out.p_gff * (1 - out.p_gff) / R + out.p_vacant * (1 - out.p_vacant) / R);
    return out;
}

std::vector<int> cable_sign_clusters(const LatticeDisk& lattice, const Eigen::VectorXd& phi, CounterRng& rng) {
    UnionFind uf(lattice.vertex_count());
    for (const auto& [x, y] : lattice.interior_edges()) {
        const double prod = phi[x] * phi[y];
        const double u = rng.uniform();
        if (prod > 0.0 && u < -std::expm1(-4.0 * prod)) uf.unite(x, y);
    }
    std::vector<int> id(static_cast<std::size_t>(lattice.vertex_count()));
    for (int v = 0; v < lattice.vertex_count(); ++v) id[static_cast<std::size_t>(v)] = uf.find(v);
    return id;
}

}  // namespace diskperc
