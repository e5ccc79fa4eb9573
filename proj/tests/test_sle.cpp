#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "diskperc/sle.hpp"
#include "diskperc/stats.hpp"

using namespace diskperc;

TEST_CASE("exponent closed forms") {
    CHECK(rho_kappa_alpha(8.0 / 3.0, 5.0 / 8.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lambda_kappa(8.0 / 3.0) == doctest::Approx(0.0));
    CHECK(lambda_kappa(2.0) == doctest::Approx(-1.0));
    CHECK(lambda_kappa(4.0) == doctest::Approx(0.5));
    for (double kappa : {8.0 / 3.0, 3.0, 4.0})
        for (double alpha : {0.2, 5.0 / 8.0, 1.0, 3.0}) {
            const double rho = rho_kappa_alpha(kappa, alpha);
            CHECK(rho > -2.0);
            CHECK(alpha_from_rho(kappa, rho) == doctest::Approx(alpha).epsilon(1e-12));
        }
    CHECK(bessel_dimension(8.0 / 3.0, 0.0) == doctest::Approx(2.5));
    CHECK_THROWS_AS(rho_kappa_alpha(2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(rho_kappa_alpha(3.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(lambda_kappa(0.0), std::domain_error);
}

TEST_CASE("driving path structure") {
    CounterRng rng(1, 0);
    const auto p = sample_driving(8.0 / 3.0, rho_kappa_alpha(8.0 / 3.0, 0.3), 1.0, 1e-3, rng);
    REQUIRE(p.W.size() == 1001);
    CHECK(p.W[0] == 0.0);
    CHECK(p.V[0] == 0.0);
    for (std::size_t k = 1; k < p.W.size(); ++k) {
        CHECK(p.V[k] <= p.V[k - 1]);
        CHECK(p.V[k] <= p.W[k]);
        CHECK(p.t[k] == doctest::Approx(static_cast<double>(k) * 1e-3));
    }
    CHECK_THROWS_AS(sample_driving(3.0, -2.5, 1.0, 0.1, rng), std::domain_error);
    CHECK_THROWS_AS(sample_driving(3.0, 0.0, 1.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("rho = 0 driving has variance kappa t") {
    const double kappa = 3.0;
    for (DrivingScheme scheme : {DrivingScheme::ExactBessel, DrivingScheme::Euler}) {
        const auto ends = run_replicas<double>(4000, 2, [&](std::int64_t, CounterRng& rng) {
            return sample_driving(kappa, 0.0, 1.0, 1e-3, rng, scheme).W.back();
        });
        const auto mv = stats::mean_var(ends);
        CHECK(std::abs(mv.mean) < 4 * std::sqrt(kappa / 4000.0));
        CHECK(std::abs(mv.variance / kappa - 1.0) < 0.1);
    }
}

TEST_CASE("zero driving traces a vertical segment") {
    const double dt = 0.01;
    const auto d = driving_from_samples(std::vector<double>(101, 0.0), dt);
    const auto tr = solve_trace(d);
    REQUIRE(tr.points.size() == 101);
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
        CHECK(std::abs(tr.points[k].real()) < 1e-12);
        CHECK(tr.points[k].imag() == doctest::Approx(2.0 * std::sqrt(tr.t[k])).epsilon(1e-12));
    }
    CHECK(tr.dist_negative_axis.back() == doctest::Approx(0.0));
    CHECK_FALSE(tr.overflow);
    CHECK_THROWS_AS(solve_trace(d, 0), std::invalid_argument);
}

TEST_CASE("Brownian scaling of the trace") {
    const double dt = 1e-3, c = 1.7;
    std::vector<double> W, Wc;
    for (int k = 0; k <= 400; ++k) {
        const double t = k * dt;
        W.push_back(std::sin(5 * t) + t);
        Wc.push_back(c * W.back());
    }
    const auto a = solve_trace(driving_from_samples(W, dt));
    const auto b = solve_trace(driving_from_samples(Wc, c * c * dt));
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) CHECK(std::abs(b.points[k] - c * a.points[k]) < 1e-9);
}

TEST_CASE("sampled trace: upper half-plane, capacity and unzip") {
    CounterRng rng(3, 0);
    const auto d = sample_driving(8.0 / 3.0, 0.0, 1.0, 1e-3, rng);
    const auto tr = solve_trace(d);
    REQUIRE_FALSE(tr.overflow);
    for (const auto& z : tr.points) CHECK(z.imag() >= -1e-12);
    for (std::size_t k : {std::size_t{100}, std::size_t{500}, std::size_t{1000}})
        CHECK(half_plane_capacity(d, k) == doctest::Approx(2.0 * d.t[k]).epsilon(0.01));
    CHECK_THROWS_AS(half_plane_capacity(d, 5000), std::out_of_range);

    const auto back = unzip(tr.points);
    REQUIRE(back.W.size() == 1000);
    for (std::size_t k = 0; k < back.W.size(); k += 50) {
        CHECK(back.W[k] == doctest::Approx(d.W[k + 1]).epsilon(1e-6));
        CHECK(back.dt[k] == doctest::Approx(1e-3).epsilon(1e-6));
    }
}

TEST_CASE("squared Bessel bridge hitting probability") {
    // dimension 1 is |B|^2, where the reflection principle gives 2q/(1+q), q = exp(-2 sqrt(xy)/dt)
    for (auto [x, y, dt] : {std::tuple{0.5, 0.3, 0.2}, std::tuple{1.0, 2.0, 1.0}, std::tuple{0.01, 0.02, 0.05}}) {
        const double q = std::exp(-2.0 * std::sqrt(x * y) / dt);
        CHECK(besq_bridge_hit_probability(1.0, x, y, dt) == doctest::Approx(2 * q / (1 + q)).epsilon(1e-10));
    }
    CHECK(besq_bridge_hit_probability(2.5, 0.1, 0.1, 1.0) == 0.0);
    CHECK(besq_bridge_hit_probability(1.0, 0.0, 0.1, 1.0) == 1.0);
    // far regime stays continuous with the Bessel-function branch
    const double near = besq_bridge_hit_probability(0.7, 49.9, 49.9, 1.0);
    const double far = besq_bridge_hit_probability(0.7, 50.1, 50.1, 1.0);
    CHECK(far == doctest::Approx(near * std::exp(-0.4)).epsilon(0.02));
}

TEST_CASE("hit statistic is monotone in alpha") {
    const auto hs = boundary_hit_statistic(8.0 / 3.0, {0.2, 1.0, 3.0}, 5.0, 1e-3, 0.01, 200, 4, 500);
    CHECK(hs.reps == 200);
    CHECK(hs.monotone_violations == 0);
    CHECK(hs.fraction[0] >= hs.fraction[1]);
    CHECK(hs.fraction[1] >= hs.fraction[2]);
    for (std::size_t j = 0; j < 3; ++j) CHECK(hs.zero_hit_fraction[j] <= hs.fraction[j]);
}

TEST_CASE("restriction formulas and the lattice check") {
    for (double alpha : {1.0 / 3.0, 1.0, 2.0})
        CHECK(restriction_exact(alpha, 1.0, 0.5) == doctest::Approx(std::pow(0.75, alpha)).epsilon(1e-14));
    CHECK_THROWS_AS(restriction_exact(1.0, 1.0, 1.5), std::domain_error);

    CHECK(std::abs(disk_to_half_plane({0.0, 0.0}) - Complex(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(disk_to_half_plane({0.0, -1.0}) - Complex(-1.0, 0.0)) < 1e-15);
    const Complex lower = disk_to_half_plane(std::polar(1.0, -2.0));
    CHECK(std::abs(lower.imag()) < 1e-14);
    CHECK(lower.real() < 0.0);

    const double exact = restriction_discrete_exact(1.0, 1.0, 0.5, 32);
    CHECK(exact > 0.0);
    CHECK(exact < 1.0);
    const auto mc = restriction_check(1.0, 1.0, 0.5, 4000, 5, 32);
    CHECK(std::abs(mc.p_hat - exact) < 4 * std::sqrt(exact * (1 - exact) / 4000.0));
    CHECK(mc.p_exact == doctest::Approx(0.75));
    CHECK(restriction_check(1.0, 1.0, 0.5, 0, 5, 32).reps == 0);
}
