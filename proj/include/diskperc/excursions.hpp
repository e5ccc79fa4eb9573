#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "diskperc/lattice.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/rng.hpp"

namespace diskperc {

/// Runs simple random walk from `start` until it steps onto the outer boundary.
/// `visit(v)` is called on every vertex visit, including the start.
/// Returns the boundary-edge id of the exit step.
template <class Visit>
int walk_to_boundary(const LatticeDisk& lattice, int start, DirectionStream& dirs, Visit&& visit) {
    int v = start;
    for (;;) {
        visit(v);
        const int d = dirs.next();
        const NeighbourCode c = lattice.neighbour(v, d);
        if (is_boundary_code(c)) return lattice.boundary_edge_id(v, d);
        v = c;
    }
}

struct ExcursionRecord {
    double label = 0.0;
    int entry_edge = -1;       // boundary edge used to enter, -1 for forward parts
    int exit_edge = -1;        // boundary edge used to leave
    int start_vertex = -1;     // first interior vertex
    std::int64_t steps = 0;    // lifetime m (interior visits + 1)
    std::vector<int> path;     // interior vertices, only when requested
};

/// Labeled excursions with the per-vertex smallest label that visits it, so the
/// occupied set at any level u' <= u is {v : first_label[v] <= u'}.
struct ExcursionCloud {
    double u = 0.0;
    std::vector<ExcursionRecord> excursions;
    std::vector<double> first_label;

    std::int64_t count() const noexcept { return static_cast<std::int64_t>(excursions.size()); }
    VertexSet occupied_at(double level) const;
    VertexSet occupied() const { return occupied_at(u); }
    /// Cloud restricted to labels <= level.
    ExcursionCloud thinned(double level) const;
};

struct CloudOptions {
    bool store_paths = false;
};

enum class CloudSampler { Direct, Local, SingleWalk };

ExcursionCloud sample_cloud_direct(const LatticeDisk& lattice, double u, CounterRng& rng, CloudOptions opt = {});
/// Forward parts after the first visit to K, started from the normalized equilibrium measure.
ExcursionCloud sample_hitting_K(const LatticeDisk& lattice, double u, const EquilibriumMeasure& eK,
                                CounterRng& rng, CloudOptions opt = {});
/// Continuous-time walk on D_n plus a collapsed boundary vertex until its local time reaches u.
ExcursionCloud sample_cloud_single_walk(const LatticeDisk& lattice, double u, CounterRng& rng, CloudOptions opt = {});

VertexSet vacant_set(const ExcursionCloud& cloud, const LatticeDisk& lattice);

/// Sampler-independent view used by the equivalence tests: for each excursion
/// that visits K, its first vertex in K, the first vertex after that with
/// |x| >= exit_radius (-1 if none) and the exit edge of the forward part.
struct HittingRecord {
    int first_hit = -1;
    int ball_exit = -1;
    int exit_edge = -1;
};
std::vector<HittingRecord> hitting_records_direct(const LatticeDisk& lattice, double u, const VertexSet& K,
                                                  CounterRng& rng, double exit_radius = 0.4);
std::vector<HittingRecord> hitting_records_local(const LatticeDisk& lattice, double u, const EquilibriumMeasure& eK,
                                                 CounterRng& rng, double exit_radius = 0.4);
std::vector<HittingRecord> hitting_records_single(const LatticeDisk& lattice, double u, const VertexSet& K,
                                                  CounterRng& rng, double exit_radius = 0.4);

// Continuum excursions through a ball B(r), via the local description.

struct ContinuumPath {
    std::vector<Point> points;
    bool absorbed = false;  // reached the unit circle
};

struct ContinuumExcursion {
    Point start;
    ContinuumPath forward;
    ContinuumPath backward;
};

struct ContinuumOptions {
    bool store_paths = true;
    std::int64_t max_steps = 50'000'000;
};

std::vector<ContinuumExcursion> sample_continuum_cloud_ball(double u, double r, double dt, CounterRng& rng,
                                                            ContinuumOptions opt = {});
/// Brownian motion from x with step dt; true if it enters B(r_target) before the unit circle.
bool continuum_hits_ball(Point x, double r_target, double dt, CounterRng& rng);
/// Backward part only: conditioned diffusion from a point on the circle |z| = r.
ContinuumPath conditioned_path(Point start, double r, double dt, CounterRng& rng, ContinuumOptions opt = {});

}  // namespace diskperc
