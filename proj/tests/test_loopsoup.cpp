#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "diskperc/loopsoup.hpp"
#include "diskperc/parallel.hpp"
#include "diskperc/stats.hpp"

using namespace diskperc;

namespace {

Eigen::MatrixXd walk_matrix(const LatticeDisk& L) {
    const int N = L.vertex_count();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    for (int v = 0; v < N; ++v)
        for (NeighbourCode w : L.neighbours(v))
            if (!is_boundary_code(w)) P(v, w) = 0.25;
    return P;
}

bool adjacent(const LatticeDisk& L, int a, int b) {
    for (NeighbourCode w : L.neighbours(a))
        if (w == b) return true;
    return false;
}

}  // namespace

TEST_CASE("peel plan is a permutation with return probabilities in [0,1)") {
    for (int n : {1, 2, 5, 12}) {
        const LatticeDisk L(n);
        for (PeelOrder order : {PeelOrder::NestedDissection, PeelOrder::RowMajor}) {
            const LoopSoupPlan plan(L, order);
            auto p = plan.peel_order();
            REQUIRE(static_cast<int>(p.size()) == L.vertex_count());
            for (int k = 0; k < L.vertex_count(); ++k) CHECK(plan.rank(p[static_cast<std::size_t>(k)]) == k);
            std::sort(p.begin(), p.end());
            for (int k = 0; k < L.vertex_count(); ++k) CHECK(p[static_cast<std::size_t>(k)] == k);
            for (int v = 0; v < L.vertex_count(); ++v) {
                CHECK(plan.return_probability(v) >= 0.0);
                CHECK(plan.return_probability(v) < 1.0);
            }
        }
    }
    const LatticeDisk L1(1);
    CHECK(LoopSoupPlan(L1).return_probability(0) == doctest::Approx(0.0));
}

TEST_CASE("sum of peel weights is -log det(I - P)") {
    const LatticeDisk L(6);
    const double oracle = -std::log((Eigen::MatrixXd::Identity(L.vertex_count(), L.vertex_count()) - walk_matrix(L)).determinant());
    for (PeelOrder order : {PeelOrder::NestedDissection, PeelOrder::RowMajor}) {
        const LoopSoupPlan plan(L, order);
        double s = 0.0;
        for (int v = 0; v < L.vertex_count(); ++v) s += -std::log1p(-plan.return_probability(v));
        CHECK(s == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("loops are closed nearest-neighbour walks of even length") {
    const LatticeDisk L(6);
    const LoopSoupPlan plan(L);
    CounterRng rng(3, 0);
    const auto soup = sample_loop_soup(plan, 2.0, rng);
    REQUIRE(!soup.loops.empty());
    for (const auto& loop : soup.loops) {
        CHECK(loop.length() % 2 == 0);
        CHECK(loop.vertices.front() == loop.base);
        for (int k = 0; k < loop.length(); ++k)
            CHECK(adjacent(L, loop.vertices[static_cast<std::size_t>(k)],
                           loop.vertices[static_cast<std::size_t>((k + 1) % loop.length())]));
        int lowest = plan.rank(loop.base);
        for (int v : loop.vertices) lowest = std::min(lowest, plan.rank(v));
        CHECK(lowest == plan.rank(loop.base));
    }
    for (int v = 0; v < L.vertex_count(); ++v) {
        const int c = soup.cluster[static_cast<std::size_t>(v)];
        if (c >= 0) CHECK(soup.cluster[static_cast<std::size_t>(c)] == c);
    }
    const auto sizes = soup.cluster_sizes();
    const int covered = static_cast<int>(std::count_if(soup.cluster.begin(), soup.cluster.end(), [](int c) { return c >= 0; }));
    CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == covered);

    CHECK_THROWS_AS(sample_loop_soup(plan, 0.0, rng), std::invalid_argument);
}

TEST_CASE("loop counts match the loop measure at n=2") {
    const LatticeDisk L(2);
    const double lambda = 0.5;
    const auto mass = loop_length_mass(L, lambda, 400);
    CHECK(mass[1] == doctest::Approx(0.0));
    CHECK(mass[3] == doctest::Approx(0.0));
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);

    const LoopSoupPlan plan(L);
    const auto soups = run_replicas<LoopSoupSample>(
        10000, 4, [&](std::int64_t, CounterRng& rng) { return sample_loop_soup(plan, lambda, rng); });
    std::vector<std::int64_t> counts;
    double len2 = 0, len4 = 0;
    for (const auto& s : soups) {
        counts.push_back(static_cast<std::int64_t>(s.loops.size()));
        for (const auto& l : s.loops) {
            len2 += l.length() == 2;
            len4 += l.length() == 4;
        }
    }
    CHECK(stats::poisson_gof(counts, total).p_value > 1e-3);
    const double reps = static_cast<double>(soups.size());
    CHECK(std::abs(len2 / reps - mass[2]) < 4 * std::sqrt(mass[2] / reps));
    CHECK(std::abs(len4 / reps - mass[4]) < 4 * std::sqrt(mass[4] / reps));
}

TEST_CASE("rejection oracle: loops at the origin and truncation") {
    const LatticeDisk L(2);
    const double lambda = 0.5;
    CounterRng probe(1, 0);
    const auto once = loop_rejection_oracle(L, lambda, 12, probe);
    CHECK(once.truncated_mass < 0.01 * once.retained_mass);
    for (const auto& l : once.sample.loops) CHECK(l.length() % 2 == 0);

    // length-2 loops rooted at the origin have mass lambda * P^2(0,0) / 2 = lambda / 8
    const int o = *L.vertex_at({0, 0});
    const auto soups = run_replicas<LoopSoupSample>(10000, 5, [&](std::int64_t, CounterRng& rng) {
        return loop_rejection_oracle(L, lambda, 12, rng).sample;
    });
    double at_origin = 0;
    for (const auto& s : soups)
        for (const auto& l : s.loops)
            if (l.length() == 2 && std::find(l.vertices.begin(), l.vertices.end(), o) != l.vertices.end()) at_origin += 1;
    // each such loop is rooted at the origin or at its partner: four partners, each with P^2 = 1/16
    const double expected = lambda / 8.0 + 4 * lambda / 16.0 / 2.0;
    const double reps = static_cast<double>(soups.size());
    CHECK(std::abs(at_origin / reps - expected) < 4 * std::sqrt(expected / reps));

    CHECK_THROWS_AS(loop_rejection_oracle(LatticeDisk(8), lambda, 12, probe), std::invalid_argument);
}

TEST_CASE("peel order does not change the loop law") {
    const LatticeDisk L(3);
    auto histogram = [&](PeelOrder order, std::uint64_t seed) {
        const LoopSoupPlan plan(L, order);
        std::vector<double> counts(40, 0.0), lengths(40, 0.0);
        const auto soups = run_replicas<LoopSoupSample>(
            8000, seed, [&](std::int64_t, CounterRng& rng) { return sample_loop_soup(plan, 0.5, rng); });
        for (const auto& s : soups) {
            counts[std::min<std::size_t>(s.loops.size(), 39)] += 1;
            for (const auto& l : s.loops) lengths[std::min<std::size_t>(static_cast<std::size_t>(l.length()), 39)] += 1;
        }
        return std::pair{counts, lengths};
    };
    const auto [c1, l1] = histogram(PeelOrder::NestedDissection, 6);
    const auto [c2, l2] = histogram(PeelOrder::RowMajor, 7);
    CHECK(stats::two_sample_chi_square(c1, c2).p_value > 1e-3);
    CHECK(stats::two_sample_chi_square(l1, l2).p_value > 1e-3);
}

TEST_CASE("combined occupied set") {
    const LatticeDisk L(4);
    const int a = *L.vertex_at({0, 0}), b = *L.vertex_at({1, 0});
    const int c = *L.vertex_at({-2, 2}), d = *L.vertex_at({-2, 1});
    LoopSoupSample soup;
    soup.cluster.assign(static_cast<std::size_t>(L.vertex_count()), -1);
    soup.cluster[static_cast<std::size_t>(a)] = a;
    soup.cluster[static_cast<std::size_t>(b)] = a;
    soup.cluster[static_cast<std::size_t>(c)] = c;
    soup.cluster[static_cast<std::size_t>(d)] = c;

    VertexSet trace = L.none();
    trace.insert(b);
    trace.insert(*L.vertex_at({0, 3}));
    const VertexSet out = combined_occupied(L, trace, soup);
    CHECK(out.contains(a));
    CHECK(out.contains(b));
    CHECK_FALSE(out.contains(c));
    CHECK_FALSE(out.contains(d));
    CHECK(out.count() == 3);

    CHECK(combined_occupied(L, trace, LoopSoupSample{}) == trace);
    CHECK_THROWS_AS(combined_occupied(L, LatticeDisk(3).none(), soup), std::invalid_argument);
}
