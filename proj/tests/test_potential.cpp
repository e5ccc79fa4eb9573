#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "diskperc/potential.hpp"
#include "diskperc/rng.hpp"

using namespace diskperc;
using std::numbers::pi;

namespace {

// Green function as (1/4) * sum_k P^k with P = A/4, truncated at `steps` terms.
Eigen::MatrixXd green_path_sum(const LatticeDisk& L, int steps) {
    const int N = L.vertex_count();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    for (int v = 0; v < N; ++v)
        for (NeighbourCode w : L.neighbours(v))
            if (!is_boundary_code(w)) P(v, w) = 0.25;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(N, N), sum = term;
    for (int k = 1; k < steps; ++k) {
        term = term * P;
        sum += term;
    }
    return 0.25 * sum;
}

int origin(const LatticeDisk& L) { return *L.vertex_at({0, 0}); }

}  // namespace

TEST_CASE("Green function small cases") {
    const LatticeDisk L1(1);
    const DirichletSolver s1(L1);
    CHECK(s1.green(0, 0) == doctest::Approx(0.25).epsilon(1e-14));

    const LatticeDisk L2(2);
    const DirichletSolver s2(L2);
    const Eigen::MatrixXd G = green_path_sum(L2, 10000);
    for (int x = 0; x < 9; ++x)
        for (int y = 0; y < 9; ++y) CHECK(std::abs(s2.green(x, y) - G(x, y)) < 1e-9);
    CHECK(s2.green(origin(L2), origin(L2)) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK_THROWS(s2.green(-1, 0));
    CHECK_THROWS(s2.green(9, 0));
}

TEST_CASE("Green function is symmetric") {
    const LatticeDisk L(16);
    const DirichletSolver s(L);
    CounterRng rng(3, 0);
    for (int k = 0; k < 30; ++k) {
        const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(L.vertex_count())));
        const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(L.vertex_count())));
        CHECK(std::abs(s.green(x, y) - s.green(y, x)) < 1e-14);
    }
}

TEST_CASE("iterative solver agrees with the factorization") {
    const LatticeDisk L(24);
    const DirichletSolver direct(L);
    const DirichletSolver cg(L, {.direct_limit = 10});
    CHECK(cg.iterative());
    CHECK_FALSE(direct.iterative());
    const int o = origin(L);
    for (int y : {o, 5, 100}) CHECK(std::abs(direct.green(o, y) - cg.green(o, y)) < 1e-9);
    CHECK(std::abs(capacity(direct, ball_vertices(L, {0, 0}, 0.4)) - capacity(cg, ball_vertices(L, {0, 0}, 0.4))) < 1e-8);
}

TEST_CASE("equilibrium measure examples") {
    const LatticeDisk L2(2);
    const DirichletSolver s2(L2);
    const EquilibriumMeasure e0 = equilibrium_measure(s2, ball_vertices(L2, {0, 0}, 0.0));
    CHECK(e0.capacity == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(e0.support == std::vector<int>{origin(L2)});

    const LatticeDisk L(12);
    const DirichletSolver s(L);
    const EquilibriumMeasure all = equilibrium_measure(s, L.all());
    CHECK(all.capacity == doctest::Approx(L.boundary_edge_count()).epsilon(1e-12));
    for (int v = 0; v < L.vertex_count(); ++v) CHECK(all.weight[v] == doctest::Approx(L.boundary_degree(v)).epsilon(1e-12));

    CHECK_THROWS_AS(equilibrium_measure(s, L.none()), std::invalid_argument);
    CHECK_THROWS_AS(capacity(s, L.none()), std::invalid_argument);
}

TEST_CASE("last-exit identity and the dense cross-check") {
    const LatticeDisk L(16);
    const DirichletSolver s(L);
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 10; ++trial) {
        VertexSet K = L.none();
        const double p = 0.02 + 0.2 * rng.uniform();
        for (int v = 0; v < L.vertex_count(); ++v)
            if (rng.uniform() < p) K.insert(v);
        if (K.empty()) K.insert(origin(L));
        const EquilibriumMeasure e = equilibrium_measure(s, K);
        const Eigen::VectorXd h = s.solve(e.weight);
        for (int x : K.indices()) CHECK(std::abs(h[x] - 1.0) < 1e-10);
        for (int v = 0; v < L.vertex_count(); ++v) {
            CHECK(e.weight[v] >= -1e-14);
            CHECK(e.weight[v] <= 4.0 + 1e-12);
            if (!K.contains(v)) CHECK(e.weight[v] == 0.0);
            CHECK(h[v] <= 1.0 + 1e-10);
        }
        if (trial < 3) {
            const EquilibriumMeasure d = equilibrium_measure_dense(s, K);
            CHECK((d.weight - e.weight).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("support lies on the interior boundary of K") {
    const LatticeDisk L(20);
    const DirichletSolver s(L);
    const VertexSet K = ball_vertices(L, {0.1, 0.0}, 0.35);
    const VertexSet ib = inner_boundary_of(L, K);
    const EquilibriumMeasure e = equilibrium_measure(s, K);
    for (int v : e.support) CHECK(ib.contains(v));
}

TEST_CASE("Es statistic") {
    const LatticeDisk L(16);
    const DirichletSolver s(L);
    CHECK(es_statistic(s, ball_vertices(L, {0, 0}, 0.0)) == 0.0);
    std::vector<double> es;
    for (int n : {16, 32, 64, 128}) {
        const LatticeDisk M(n);
        const DirichletSolver sm(M);
        const VertexSet K = ball_vertices(M, {0, 0}, 0.5);
        const double v = es_statistic(sm, K);
        CHECK(v <= 4.0 / capacity(sm, K));
        es.push_back(v);
    }
    for (std::size_t k = 1; k < es.size(); ++k) CHECK(es[k] < es[k - 1]);
}

TEST_CASE("continuum closed forms") {
    CHECK(continuum_green({0, 0}, {0.5, 0}) == doctest::Approx(std::log(2.0) / (2 * pi)).epsilon(1e-14));
    CHECK(continuum_green({0, 0}, {0, 0.5}) == doctest::Approx(std::log(2.0) / (2 * pi)).epsilon(1e-14));
    CHECK(std::isinf(continuum_green({0.2, 0.1}, {0.2, 0.1})));
    CHECK(continuum_green({0.3, -0.2}, {-0.1, 0.4}) == doctest::Approx(continuum_green({-0.1, 0.4}, {0.3, -0.2})));
    CHECK_THROWS(continuum_green({1.0, 0}, {0, 0}));
    CHECK(continuum_cap_ball(0.5) == doctest::Approx(2 * pi / std::log(2.0)).epsilon(1e-14));
    CHECK(continuum_annulus_hit(0.5, 0.25, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(continuum_annulus_hit(0.25, 0.25, 1.0) == doctest::Approx(1.0));
    CHECK(continuum_annulus_hit(1.0, 0.25, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS(continuum_cap_ball(1.0));
    CHECK_THROWS(continuum_cap_ball(0.0));
    CHECK_THROWS(continuum_annulus_hit(0.1, 0.25, 1.0));
}

TEST_CASE("discrete Green function approaches the continuum one at rate 1/(|y| n)") {
    std::vector<double> scaled;
    for (int n : {16, 32, 64, 128}) {
        const LatticeDisk L(n);
        const DirichletSolver s(L);
        const int y = *L.vertex_at({n / 2, 0});
        const double d = std::abs(s.green(origin(L), y) - continuum_green({0, 0}, L.position(y)));
        scaled.push_back(d * 0.5 * n);
    }
    for (double v : scaled) CHECK(v < 1.0);
    CHECK(scaled.back() <= scaled.front() * 1.5);
}

TEST_CASE("ball capacity converges at rate 1/n") {
    const auto rows = capacity_convergence_ball(0.5, {16, 32, 64});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(r.cap_continuum == doctest::Approx(2 * pi / std::log(2.0)));
    CHECK(rows[0].error / rows[1].error > 1.7);
    CHECK(rows[1].error / rows[2].error > 1.7);
    for (const auto& r : rows) CHECK(r.error * r.n < 20.0);
}

TEST_CASE("last-exit law from the origin approaches the normalized equilibrium measure") {
    std::vector<double> tv;
    for (int n : {16, 32, 64}) {
        const LatticeDisk L(n);
        const DirichletSolver s(L);
        const EquilibriumMeasure e = equilibrium_measure(s, ball_vertices(L, {0, 0}, 0.5));
        const Eigen::VectorXd last = last_exit_distribution(s, e, origin(L));
        CHECK(last.sum() == doctest::Approx(1.0).epsilon(1e-10));
        tv.push_back(0.5 * (last - e.weight / e.capacity).cwiseAbs().sum());
    }
    CHECK(tv[1] < tv[0]);
    CHECK(tv[2] < tv[1]);
}

TEST_CASE("exit law from a vertex is a probability distribution") {
    const LatticeDisk L(10);
    const DirichletSolver s(L);
    const auto p = exit_distribution(s, origin(L));
    double total = 0.0;
    for (double x : p) {
        CHECK(x >= 0.0);
        total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
