#include "diskperc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "diskperc/excursions.hpp"
#include "diskperc/gff.hpp"
#include "diskperc/loopsoup.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/union_find.hpp"

namespace diskperc {

namespace {

bool joined(const LatticeDisk& lattice, UnionFind& uf, const VertexSet& open, const VertexSet& A, const VertexSet& B) {
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(lattice.vertex_count()), 0);
    bool any = false;
    for (int v = 0; v < lattice.vertex_count(); ++v) {
        if (open.contains(v) && A.contains(v)) {
            mark[static_cast<std::size_t>(uf.find(v))] = 1;
            any = true;
        }
    }
    if (!any) return false;
    for (int v = 0; v < lattice.vertex_count(); ++v)
        if (open.contains(v) && B.contains(v) && mark[static_cast<std::size_t>(uf.find(v))]) return true;
    return false;
}

}  // namespace

bool connected(const LatticeDisk& lattice, const VertexSet& open, const VertexSet& A, const VertexSet& B) {
    UnionFind uf(lattice.vertex_count());
    for (const auto& [x, y] : lattice.interior_edges())
        if (open.contains(x) && open.contains(y)) uf.unite(x, y);
    return joined(lattice, uf, open, A, B);
}

bool connected_edges(const LatticeDisk& lattice, const VertexSet& open, const std::vector<std::uint8_t>& edge_open,
                     const VertexSet& A, const VertexSet& B) {
    UnionFind uf(lattice.vertex_count());
    const auto edges = lattice.interior_edges();
    if (edge_open.size() != edges.size()) throw std::invalid_argument("connected_edges: edge flag size mismatch");
    for (std::size_t k = 0; k < edges.size(); ++k)
        if (edge_open[k] && open.contains(edges[k][0]) && open.contains(edges[k][1])) uf.unite(edges[k][0], edges[k][1]);
    return joined(lattice, uf, open, A, B);
}

std::string to_string(Model m) {
    switch (m) {
        case Model::VacantExcursion: return "vacant-excursion";
        case Model::VacantLoops: return "vacant-loops";
        case Model::GffLevel: return "gff-level";
        case Model::CableGffLevel: return "cable-gff-level";
    }
    return "?";
}

std::string to_string(Target t) {
    switch (t) {
        case Target::OuterBall: return "outer-ball";
        case Target::InnerBoundary: return "inner-boundary";
        case Target::BoundaryLayer: return "boundary-layer";
    }
    return "?";
}

Model parse_model(const std::string& s) {
    for (Model m : {Model::VacantExcursion, Model::VacantLoops, Model::GffLevel, Model::CableGffLevel})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown model '" + s + "'");
}

Target parse_target(const std::string& s) {
    for (Target t : {Target::OuterBall, Target::InnerBoundary, Target::BoundaryLayer})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown target '" + s + "'");
}

VertexSet crossing_target(const LatticeDisk& lattice, const CrossingSpec& spec) {
    if (!(spec.r >= 0.0 && spec.eps > 0.0 && spec.r < 1.0 - spec.eps))
        throw std::invalid_argument("crossing: need 0 <= r < 1 - eps < 1");
    switch (spec.target) {
        case Target::OuterBall: return outside_radius(lattice, 1.0 - spec.eps);
        case Target::InnerBoundary: {
            VertexSet out = lattice.none();
            for (int v : lattice.inner_boundary()) out.insert(v);
            return out;
        }
        case Target::BoundaryLayer: return outside_radius(lattice, 1.0 - std::pow(lattice.n(), -1.0 / 7.0));
    }
    return lattice.none();
}

Estimate make_estimate(std::int64_t successes, std::int64_t reps, std::uint64_t seed) {
    Estimate e;
    e.successes = successes;
    e.reps = reps;
    e.seed = seed;
    if (reps > 0) {
        e.p_hat = static_cast<double>(successes) / static_cast<double>(reps);
        e.stderr_p = std::sqrt(e.p_hat * (1 - e.p_hat) / static_cast<double>(reps));
    }
    return e;
}

std::vector<std::vector<std::uint8_t>> crossing_events(const CrossingSpec& spec, int n,
                                                       const std::vector<double>& params, std::int64_t reps,
                                                       std::uint64_t seed, Execution mode) {
    const LatticeDisk lat(n);
    const VertexSet inner = ball_vertices(lat, {0.0, 0.0}, spec.r);
    const VertexSet outer = crossing_target(lat, spec);
    const bool field_model = spec.model == Model::GffLevel || spec.model == Model::CableGffLevel;

    std::unique_ptr<DirichletSolver> solver;
    std::unique_ptr<LoopSoupPlan> plan;
    if (field_model) solver = std::make_unique<DirichletSolver>(lat, SolverOptions{.cache_columns = 0});
    if (spec.model == Model::VacantLoops && spec.lambda > 0.0) plan = std::make_unique<LoopSoupPlan>(lat);
    double u_max = 0.0;
    if (!field_model) {
        for (double p : params) {
            if (p < 0.0) throw std::invalid_argument("crossing: u must be >= 0");
            u_max = std::max(u_max, p);
        }
    }

    return run_replicas<std::vector<std::uint8_t>>(
        reps, seed,
        [&](std::int64_t, CounterRng& rng) {
            std::vector<std::uint8_t> ev(params.size(), 0);
            if (field_model) {
                CounterRng field_rng = rng.split(1), edge_rng = rng.split(2);
                const Eigen::VectorXd phi = sample_dgff(*solver, field_rng);
                std::vector<double> uniforms;
                if (spec.model == Model::CableGffLevel) uniforms = edge_uniforms(lat, edge_rng);
                for (std::size_t j = 0; j < params.size(); ++j) {
                    if (spec.model == Model::GffLevel) {
                        ev[j] = connected(lat, level_set(phi, params[j]), inner, outer);
                    } else {
                        const CableLevelSet c = cable_open_at(lat, phi, params[j], uniforms);
                        ev[j] = connected_edges(lat, c.vertices, c.open, inner, outer);
                    }
                }
                return ev;
            }
            CounterRng cloud_rng = rng.split(3), soup_rng = rng.split(4);
            ExcursionCloud cloud;
            if (u_max > 0.0) {
                cloud = sample_cloud_direct(lat, u_max, cloud_rng);
            } else {
                cloud.first_label.assign(static_cast<std::size_t>(lat.vertex_count()),
                                         std::numeric_limits<double>::infinity());
            }
            LoopSoupSample soup;
            if (plan) soup = sample_loop_soup(*plan, spec.lambda, soup_rng);
            for (std::size_t j = 0; j < params.size(); ++j) {
                VertexSet occ = cloud.occupied_at(params[j]);
                if (plan) occ = combined_occupied(lat, occ, soup);
                ev[j] = connected(lat, occ.complement(), inner, outer);
            }
            return ev;
        },
        mode);
}

Estimate crossing_probability(const CrossingSpec& spec, int n, double param, std::int64_t reps, std::uint64_t seed,
                              Execution mode) {
    const auto ev = crossing_events(spec, n, {param}, reps, seed, mode);
    std::int64_t s = 0;
    for (const auto& e : ev) s += e[0];
    return make_estimate(s, reps, seed);
}

SweepResult threshold_sweep(const CrossingSpec& spec, const std::vector<double>& params, const std::vector<int>& ns,
                            std::int64_t reps, std::uint64_t seed, Execution mode) {
    if (!std::is_sorted(params.begin(), params.end())) throw std::invalid_argument("threshold_sweep: grid must be increasing");
    SweepResult out;
    for (int n : ns) {
        const auto ev = crossing_events(spec, n, params, reps, seed + static_cast<std::uint64_t>(n), mode);
        std::vector<std::int64_t> succ(params.size(), 0), trials(params.size(), reps);
        for (const auto& e : ev)
            for (std::size_t j = 0; j < params.size(); ++j) succ[j] += e[j];
        for (std::size_t j = 0; j < params.size(); ++j) {
            out.points.push_back({n, params[j], make_estimate(succ[j], reps, seed + static_cast<std::uint64_t>(n)),
                                  stats::wilson_interval(succ[j], reps)});
        }
        SweepFit f;
        f.n = n;
        if (reps > 0 && params.size() >= 2) f.fit = stats::logistic_fit(params, succ, trials);
        out.fits.push_back(f);
    }
    return out;
}

}  // namespace diskperc
