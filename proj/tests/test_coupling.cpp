#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "diskperc/coupling.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/stats.hpp"

using namespace diskperc;
using std::numbers::pi;

namespace {

double choose(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

std::int64_t brute_quantile(const std::vector<double>& pmf, std::int64_t offset, double u) {
    double c = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        c += pmf[k];
        if (c >= u) return offset + static_cast<std::int64_t>(k);
    }
    return offset + static_cast<std::int64_t>(pmf.size()) - 1;
}

double uniform_angle_cdf(double t) { return (t + pi) / (2 * pi); }

}  // namespace

TEST_CASE("quantile helpers against direct summation") {
    for (int n : {1, 2, 7, 40}) {
        std::vector<double> pmf;
        for (int k = 0; k <= n; ++k) pmf.push_back(choose(n, k) * std::pow(0.5, n));
        // u avoids exact cdf atoms such as 1/4 and 1/2, where rounding decides the answer
        for (double u : {1e-6, 0.1, 0.26, 0.49, 0.77, 0.999})
            CHECK(binomial_half_quantile(n, u) == brute_quantile(pmf, 0, u));
    }
    for (auto [T, G, D] : {std::tuple{10, 4, 3}, std::tuple{32, 20, 16}, std::tuple{9, 9, 4}, std::tuple{12, 3, 10}}) {
        const int lo = std::max(0, D - (T - G)), hi = std::min(G, D);
        std::vector<double> pmf;
        for (int j = lo; j <= hi; ++j) pmf.push_back(choose(G, j) * choose(T - G, D - j) / choose(T, D));
        for (double u : {0.01, 0.3, 0.5, 0.9, 0.9999})
            CHECK(hypergeometric_quantile(T, G, D, u) == brute_quantile(pmf, lo, u));
    }
}

TEST_CASE("horizon 2 endpoint deviation") {
    // Y_2 is -2, 0 or 2 by the quantile of B_2, so |B_2 - Y_2| > 2 exactly when |B_2| > 4
    const auto paths = run_replicas<PairedPath>(
        20000, 1, [](std::int64_t, CounterRng& rng) { return dyadic_coupling_1d(2, rng); });
    int tail = 0;
    for (const auto& p : paths) {
        const bool far = std::abs(p.B[2]) > 4.0;
        tail += far;
        CHECK((std::abs(p.B[2] - p.Y[2]) > 2.0) == far);
    }
    CHECK(tail > 0);
    CounterRng rng(1, 0);
    CHECK_THROWS_AS(dyadic_coupling_1d(1, rng), std::invalid_argument);
}

TEST_CASE("marginals of the 1D couplings") {
    for (CouplingMethod method : {CouplingMethod::Dyadic, CouplingMethod::Skorokhod}) {
        const std::int64_t H = method == CouplingMethod::Dyadic ? 48 : 16;
        const auto paths = run_replicas<PairedPath>(
            4000, 2, [&](std::int64_t, CounterRng& rng) { return coupling_1d(H, rng, method); });
        std::vector<double> observed(static_cast<std::size_t>(H) + 1, 0.0), expected(observed.size(), 0.0);
        std::vector<double> increments;
        bool unit_steps = true;
        for (const auto& p : paths) {
            REQUIRE(static_cast<std::int64_t>(p.Y.size()) == H + 1);
            CHECK(p.Y[0] == 0);
            for (std::size_t k = 1; k < p.Y.size(); ++k) unit_steps = unit_steps && std::abs(p.Y[k] - p.Y[k - 1]) == 1;
            observed[static_cast<std::size_t>((p.Y.back() + H) / 2)] += 1;
            increments.push_back(p.B[7] - p.B[6]);
        }
        CHECK(unit_steps);
        for (int k = 0; k <= H; ++k)
            expected[static_cast<std::size_t>(k)] = 4000.0 * choose(static_cast<int>(H), k) * std::pow(0.5, H);
        CHECK(stats::chi_square_gof(observed, expected).p_value > 1e-3);
        CHECK(stats::ks_test(increments, stats::normal_cdf).p_value > 1e-3);
    }
}

TEST_CASE("planar pair: starts, steps and exits") {
    CounterRng rng(3, 0);
    const auto pp = kmt_2d(16, rng, {3, -2}, {0.1, 0.2});
    CHECK(pp.walk.front().x == doctest::Approx(3.0 / 16));
    CHECK(pp.walk.front().y == doctest::Approx(-2.0 / 16));
    CHECK(pp.brownian.front().x == doctest::Approx(0.1));
    CHECK(pp.brownian.front().y == doctest::Approx(0.2));
    for (std::size_t k = 1; k < pp.walk.size(); ++k) {
        const double dx = std::abs(pp.walk[k].x - pp.walk[k - 1].x) * 16, dy = std::abs(pp.walk[k].y - pp.walk[k - 1].y) * 16;
        CHECK(dx + dy == doctest::Approx(1.0));
    }
    REQUIRE(pp.walk_exit > 0);
    REQUIRE(pp.brownian_exit > 0);
    CHECK(norm(pp.walk[static_cast<std::size_t>(pp.walk_exit)]) >= 1.0);
    CHECK(norm(pp.walk[static_cast<std::size_t>(pp.walk_exit - 1)]) < 1.0);
    CHECK(norm(pp.brownian[static_cast<std::size_t>(pp.brownian_exit)]) >= 1.0);
    CHECK_THROWS_AS(kmt_2d(1, rng), std::invalid_argument);
}

TEST_CASE("planar exit angles are uniform from the centre") {
    const auto angles = run_replicas<std::pair<double, double>>(2000, 4, [](std::int64_t, CounterRng& rng) {
        const auto pp = kmt_2d(64, rng);
        const Point w = pp.walk[static_cast<std::size_t>(pp.walk_exit)];
        const Point b = pp.brownian[static_cast<std::size_t>(pp.brownian_exit)];
        return std::pair{std::atan2(w.y, w.x), std::atan2(b.y, b.x)};
    });
    std::vector<double> wa, ba;
    for (auto [w, b] : angles) {
        wa.push_back(w);
        ba.push_back(b);
    }
    CHECK(stats::ks_test(wa, uniform_angle_cdf).p_value > 1e-3);
    CHECK(stats::ks_test(ba, uniform_angle_cdf).p_value > 1e-3);
}

TEST_CASE("last-exit gap") {
    const auto rep = last_exit_gap(0.6, 64, 400, 5, {1.0, 2.0, 4.0, 20.0});
    REQUIRE(rep.exceedance.size() == 4);
    for (std::size_t j = 1; j < 4; ++j) CHECK(rep.exceedance[j] <= rep.exceedance[j - 1]);
    CHECK(rep.exceedance[3] < 0.25);
    CHECK(rep.gaps.size() > 350);
    CHECK(stats::ks_test(rep.angles, uniform_angle_cdf).p_value > 1e-3);
    CHECK_THROWS_AS(last_exit_gap(0.4, 64, 10, 5, {1.0}), std::invalid_argument);
}

TEST_CASE("segment capacity") {
    // a segment through the centre, [-c, c], has the same capacity as [0, 2c/(1+c^2)]
    CHECK(continuum_cap_segment(-0.3, 0.3) == doctest::Approx(continuum_cap_segment(0.0, 0.6 / 1.09)).epsilon(1e-12));
    CHECK(continuum_cap_segment(0.2, 0.8) > continuum_cap_segment(0.3, 0.7));
    CHECK_THROWS_AS(continuum_cap_segment(0.5, 0.5), std::domain_error);

    const LatticeDisk L(10);
    const VertexSet K = segment_vertices(L, 0.2, 0.8);
    CHECK(K.count() == 7);
    for (int v : K.indices()) CHECK(L.site(v).j == 0);

    const auto rows = capacity_convergence_general("segment", {40, 80, 160});
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].error < rows[k - 1].error);
        CHECK(rows[k].cap_discrete > rows[k].cap_reference);
    }
    CHECK_THROWS_AS(capacity_convergence_general("segment", {2}, 0.2, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(capacity_convergence_general("blob", {8}), std::invalid_argument);

    const auto deep = capacity_convergence_general("deep-segment", {16, 64});
    CHECK(std::isnan(deep[0].cap_reference));
    CHECK(deep[1].cap_discrete > deep[0].cap_discrete);
    CHECK(deep[1].error == doctest::Approx(deep[1].cap_discrete / std::log(64.0)));
}

TEST_CASE("Beurling escape probabilities") {
    const auto res = beurling_check(64, 0.3, {0, 2, 8}, 2000, 6);
    CHECK(res.escape[0] == 0.0);
    CHECK(res.escape[1] < res.escape[2]);
    CHECK(res.distances[2] == doctest::Approx(8.0 / 64));
    CHECK_THROWS_AS(beurling_check(64, 0.7, {2}, 10, 6), std::invalid_argument);
}

TEST_CASE("excursion matching report") {
    const auto rep = excursion_match(1.0, 0.5, 16, 50, 7);
    CHECK(rep.reps == 50);
    CHECK(rep.count_mismatch_rate >= 0.0);
    CHECK(rep.count_mismatch_rate <= 1.0);
    CHECK(rep.start_distance.size() == rep.path_deviation.size());
    for (double d : rep.start_distance) CHECK(d <= 1.1);
}
