#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "diskperc/percolation.hpp"

using namespace diskperc;

namespace {

VertexSet rotate90(const LatticeDisk& L, const VertexSet& S) {
    VertexSet out = L.none();
    for (int v : S.indices()) {
        const Site s = L.site(v);
        out.insert(*L.vertex_at({-s.j, s.i}));
    }
    return out;
}

bool nonincreasing(const std::vector<std::uint8_t>& row) {
    for (std::size_t j = 1; j < row.size(); ++j)
        if (row[j] > row[j - 1]) return false;
    return true;
}

}  // namespace

TEST_CASE("connectivity basics") {
    const LatticeDisk L(8);
    const VertexSet A = ball_vertices(L, {0, 0}, 0.3);
    const VertexSet B = outside_radius(L, 0.9);
    CHECK_FALSE(connected(L, L.none(), A, B));
    CHECK(connected(L, L.all(), A, B));
    CHECK_FALSE(connected(L, L.all(), L.none(), B));
    CHECK(connected(L, A, A, A));

    // a thick closed ring separates the centre from the rim
    VertexSet open = L.all();
    for (int v = 0; v < L.vertex_count(); ++v) {
        const double r = norm(L.position(v));
        if (r >= 0.45 && r < 0.65) open.erase(v);
    }
    CHECK_FALSE(connected(L, open, A, B));
    CHECK(connected(L, open, B, B));

    std::vector<std::uint8_t> closed(static_cast<std::size_t>(L.interior_edge_count()), 0);
    std::vector<std::uint8_t> all_open(closed.size(), 1);
    CHECK_FALSE(connected_edges(L, L.all(), closed, A, B));
    CHECK(connected_edges(L, L.all(), all_open, A, B));
    CHECK_THROWS_AS(connected_edges(L, L.all(), std::vector<std::uint8_t>(3, 1), A, B), std::invalid_argument);
}

TEST_CASE("connectivity is invariant under lattice rotation") {
    const LatticeDisk L(12);
    const VertexSet A = ball_vertices(L, {0, 0}, 0.3);
    const VertexSet B = outside_radius(L, 0.85);
    CounterRng rng(1, 0);
    int yes = 0;
    for (int trial = 0; trial < 200; ++trial) {
        VertexSet open = L.none();
        for (int v = 0; v < L.vertex_count(); ++v)
            if (rng.uniform() < 0.6) open.insert(v);
        const bool c = connected(L, open, A, B);
        yes += c;
        CHECK(c == connected(L, rotate90(L, open), rotate90(L, A), rotate90(L, B)));
    }
    CHECK(yes > 0);
    CHECK(yes < 200);
}

TEST_CASE("model and target names round-trip") {
    for (Model m : {Model::VacantExcursion, Model::VacantLoops, Model::GffLevel, Model::CableGffLevel})
        CHECK(parse_model(to_string(m)) == m);
    for (Target t : {Target::OuterBall, Target::InnerBoundary, Target::BoundaryLayer})
        CHECK(parse_target(to_string(t)) == t);
    CHECK_THROWS_AS(parse_model("ising"), std::invalid_argument);
    CHECK_THROWS_AS(parse_target("nowhere"), std::invalid_argument);
}

TEST_CASE("crossing targets") {
    const LatticeDisk L(32);
    CHECK(crossing_target(L, {Model::VacantExcursion, Target::OuterBall, 0.3, 0.1}) == outside_radius(L, 0.9));
    const VertexSet ib = crossing_target(L, {Model::VacantExcursion, Target::InnerBoundary, 0.3, 0.1});
    CHECK(ib.count() == static_cast<int>(L.inner_boundary().size()));
    CHECK(ib.subset_of(outside_radius(L, 0.9)));
    CHECK_THROWS_AS(crossing_target(L, {Model::VacantExcursion, Target::OuterBall, 0.95, 0.1}), std::invalid_argument);
}

TEST_CASE("trivial levels") {
    const double inf = std::numeric_limits<double>::infinity();
    const CrossingSpec vac{Model::VacantExcursion, Target::OuterBall, 0.3, 0.1};
    CHECK(crossing_probability(vac, 16, 0.0, 50, 1).p_hat == 1.0);
    const CrossingSpec loops{Model::VacantLoops, Target::OuterBall, 0.3, 0.1, 0.0};
    CHECK(crossing_probability(loops, 16, 0.0, 20, 1).p_hat == 1.0);
    const CrossingSpec gff{Model::GffLevel, Target::OuterBall, 0.3, 0.1};
    CHECK(crossing_probability(gff, 16, -inf, 20, 2).p_hat == 1.0);
    CHECK(crossing_probability(gff, 16, inf, 20, 2).p_hat == 0.0);
    CHECK_THROWS_AS(crossing_probability(vac, 16, -1.0, 5, 1), std::invalid_argument);
}

TEST_CASE("events are monotone per replica") {
    const std::vector<double> us{0.1, 0.3, 0.6, 1.0, 2.0};
    for (Model m : {Model::VacantExcursion, Model::VacantLoops}) {
        const CrossingSpec spec{m, Target::OuterBall, 0.3, 0.1, 0.5};
        for (const auto& row : crossing_events(spec, 16, us, 100, 3)) CHECK(nonincreasing(row));
    }
    const std::vector<double> hs{-0.5, 0.0, 0.3, 0.6, 1.0};
    for (Model m : {Model::GffLevel, Model::CableGffLevel}) {
        const CrossingSpec spec{m, Target::OuterBall, 0.3, 0.1};
        for (const auto& row : crossing_events(spec, 16, hs, 100, 4)) CHECK(nonincreasing(row));
    }
}

TEST_CASE("reaching the inner boundary implies reaching the outer ball") {
    const std::vector<double> us{0.2, 0.5};
    const auto far = crossing_events({Model::VacantExcursion, Target::InnerBoundary, 0.3, 0.1}, 32, us, 200, 5);
    const auto near = crossing_events({Model::VacantExcursion, Target::OuterBall, 0.3, 0.1}, 32, us, 200, 5);
    for (std::size_t k = 0; k < far.size(); ++k)
        for (std::size_t j = 0; j < us.size(); ++j) CHECK(far[k][j] <= near[k][j]);
}

TEST_CASE("serial and parallel execution agree") {
    const CrossingSpec spec{Model::CableGffLevel, Target::OuterBall, 0.3, 0.1};
    const std::vector<double> hs{0.0, 0.4};
    CHECK(crossing_events(spec, 16, hs, 60, 6, Execution::Serial) ==
          crossing_events(spec, 16, hs, 60, 6, Execution::Parallel));
}

TEST_CASE("sweep output shape") {
    const CrossingSpec spec{Model::VacantExcursion, Target::OuterBall, 0.3, 0.1};
    const auto res = threshold_sweep(spec, {0.2, 0.6, 1.2}, {8, 16}, 40, 7);
    CHECK(res.points.size() == 6);
    CHECK(res.fits.size() == 2);
    for (const auto& p : res.points) {
        CHECK(p.wilson.lo <= p.estimate.p_hat);
        CHECK(p.estimate.p_hat <= p.wilson.hi);
    }
    CHECK_THROWS_AS(threshold_sweep(spec, {0.6, 0.2}, {8}, 10, 7), std::invalid_argument);
}
