#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "diskperc/lattice.hpp"

using namespace diskperc;

namespace {

int vertex(const LatticeDisk& L, int i, int j) {
    const auto v = L.vertex_at({i, j});
    REQUIRE(v.has_value());
    return *v;
}

}  // namespace

TEST_CASE("n = 1 is a single vertex with four boundary edges") {
    const LatticeDisk L(1);
    CHECK(L.vertex_count() == 1);
    CHECK(L.interior_edge_count() == 0);
    CHECK(L.boundary_edge_count() == 4);
    std::set<std::pair<int, int>> outer;
    for (const Site& s : L.outer_boundary()) outer.insert({s.i, s.j});
    CHECK(outer == std::set<std::pair<int, int>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

TEST_CASE("n = 2 counts and corner neighbours") {
    const LatticeDisk L(2);
    CHECK(L.vertex_count() == 9);
    CHECK(L.interior_edge_count() == 12);
    CHECK(L.boundary_edge_count() == 12);
    const int corner = vertex(L, 1, 1);
    std::set<int> interior;
    std::set<std::pair<int, int>> outside;
    for (NeighbourCode c : L.neighbours(corner)) {
        if (is_boundary_code(c)) {
            const Site s = L.outer_boundary()[static_cast<std::size_t>(boundary_index(c))];
            outside.insert({s.i, s.j});
        } else {
            interior.insert(c);
        }
    }
    CHECK(interior == std::set<int>{vertex(L, 0, 1), vertex(L, 1, 0)});
    CHECK(outside == std::set<std::pair<int, int>>{{2, 1}, {1, 2}});
}

TEST_CASE("rejects n = 0") { CHECK_THROWS_AS(LatticeDisk(0), std::invalid_argument); }

TEST_CASE("structural invariants") {
    for (int n : {1, 2, 3, 7, 16, 33, 64}) {
        const LatticeDisk L(n);
        CHECK(4 * L.vertex_count() == 2 * L.interior_edge_count() + L.boundary_edge_count());
        for (int v = 0; v < L.vertex_count(); ++v) {
            CHECK(norm(L.position(v)) < 1.0);
            int inside = 0;
            for (NeighbourCode c : L.neighbours(v)) inside += is_boundary_code(c) ? 0 : 1;
            CHECK(inside + L.boundary_degree(v) == 4);
            CHECK(L.is_inner_boundary(v) == (L.boundary_degree(v) > 0));
        }
        for (const Site& s : L.outer_boundary())
            CHECK(static_cast<long long>(s.i) * s.i + static_cast<long long>(s.j) * s.j >= static_cast<long long>(n) * n);
        for (int e = 0; e < L.boundary_edge_count(); ++e) {
            const BoundaryEdge& b = L.boundary_edges()[static_cast<std::size_t>(e)];
            CHECK(L.boundary_edge_id(b.vertex, b.direction) == e);
        }
        std::set<int> ib(L.inner_boundary().begin(), L.inner_boundary().end());
        std::set<int> from_edges;
        for (const auto& b : L.boundary_edges()) from_edges.insert(b.vertex);
        CHECK(ib == from_edges);
    }
}

TEST_CASE("area law") {
    for (int n : {64, 128}) {
        const LatticeDisk L(n);
        CHECK(std::abs(L.vertex_count() / (static_cast<double>(n) * n) / std::numbers::pi - 1.0) < 0.05);
    }
}

TEST_CASE("ball_vertices examples and monotonicity") {
    const LatticeDisk L(2);
    CHECK(ball_vertices(L, {0, 0}, 0.0).indices() == std::vector<int>{vertex(L, 0, 0)});
    const VertexSet b6 = ball_vertices(L, {0, 0}, 0.6);
    CHECK(b6.count() == 5);
    for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        CHECK(b6.contains(vertex(L, i, j)));
    CHECK(ball_vertices(L, {0, 0}, 0.8, true).count() == 9);
    CHECK(ball_vertices(L, {0, 0}, 0.5, false).count() == 1);
    CHECK(ball_vertices(L, {0, 0}, 0.5, true).count() == 5);

    const LatticeDisk M(20);
    VertexSet prev = M.none();
    for (double r = 0.0; r <= 1.0; r += 0.05) {
        const VertexSet open = ball_vertices(M, {0.1, -0.2}, r);
        const VertexSet closed = ball_vertices(M, {0.1, -0.2}, r, true);
        CHECK(open.subset_of(closed));
        if (r > 0) CHECK(prev.subset_of(open));
        prev = closed;
    }
}

TEST_CASE("annulus sectors") {
    const LatticeDisk L(64);
    const VertexSet a = annulus_sector(L, 0.3, 0.5, 0.2, SectorSide::Plus, 0);
    const VertexSet b = annulus_sector(L, 0.3, 0.5, 0.05, SectorSide::Plus, 0);
    CHECK(a == b);  // level 0 ignores eps
    const VertexSet plus = annulus_sector(L, 0.3, 0.5, 0.1, SectorSide::Plus, 0);
    const VertexSet minus = annulus_sector(L, 0.3, 0.5, 0.1, SectorSide::Minus, 0);
    const VertexSet annulus = ball_vertices(L, {0, 0}, 1.0) & outside_radius(L, 0.3 - 1.0 / 64);
    CHECK(annulus.subset_of(plus | minus));
    const VertexSet h2 = annulus_sector(L, 0.3, 0.5, 0.2, SectorSide::Plus, 2);
    const VertexSet h1 = annulus_sector(L, 0.3, 0.5, 0.2, SectorSide::Plus, 1);
    CHECK_FALSE(h2.empty());
    CHECK(h2.subset_of(h1));
    CHECK(h1.subset_of(a));
    CHECK_THROWS_AS(annulus_sector(L, 0.5, 0.3, 0.1, SectorSide::Plus, 0), std::invalid_argument);
    CHECK_THROWS_AS(annulus_sector(L, 0.3, 0.95, 0.1, SectorSide::Plus, 0), std::invalid_argument);
}

TEST_CASE("vertex set algebra") {
    VertexSet a(5), b(5);
    a.insert(1);
    a.insert(3);
    b.insert(3);
    CHECK((a & b).indices() == std::vector<int>{3});
    CHECK((a | b).count() == 2);
    CHECK(a.complement().count() == 3);
    CHECK(b.subset_of(a));
    CHECK_FALSE(a.subset_of(b));
    CHECK_THROWS_AS(a |= VertexSet(4), std::invalid_argument);
}
