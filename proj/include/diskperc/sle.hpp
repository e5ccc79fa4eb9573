#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "diskperc/parallel.hpp"
#include "diskperc/rng.hpp"

namespace diskperc {

using Complex = std::complex<double>;

double rho_kappa_alpha(double kappa, double alpha);
double lambda_kappa(double kappa);
/// Restriction exponent of SLE_kappa(rho): alpha = (rho+2)(rho+6-kappa)/(4 kappa).
double alpha_from_rho(double kappa, double rho);
/// Bessel dimension of (W - V)/sqrt(kappa).
double bessel_dimension(double kappa, double rho);

enum class DrivingScheme { ExactBessel, Euler };

struct DrivingPath {
    double kappa = 0.0;
    double rho = 0.0;
    std::vector<double> t;  // t[0] = 0
    std::vector<double> W;
    std::vector<double> V;  // force point, V <= W
};

/// Uniform grid of step dt on [0, T]. The gap X = W - V is advanced by an exact
/// squared-Bessel step (ExactBessel) or by Euler with reflection (Euler).
DrivingPath sample_driving(double kappa, double rho, double T, double dt, CounterRng& rng,
                           DrivingScheme scheme = DrivingScheme::ExactBessel);

/// Driving path from explicit samples on a uniform grid (e.g. deterministic tests).
DrivingPath driving_from_samples(std::vector<double> W, double dt);

struct LoewnerTrace {
    std::vector<Complex> points;     // gamma(t_k), points[0] = W_0
    std::vector<double> t;
    std::vector<double> dist_negative_axis;  // running min distance to (-inf, 0]
    bool overflow = false;
};

/// Zipper composition of inverse vertical-slit maps; every `stride`-th point is traced.
LoewnerTrace solve_trace(const DrivingPath& driving, int stride = 1);

/// Conformal welding in reverse: recovers driving values and time steps from a trace
/// produced by solve_trace with stride 1.
struct Unzipped {
    std::vector<double> W;
    std::vector<double> dt;
};
Unzipped unzip(const std::vector<Complex>& trace);

/// Half-plane capacity of the hull at step k, from the expansion of the inverse map at infinity.
double half_plane_capacity(const DrivingPath& driving, std::size_t k);

struct HitStatistic {
    std::vector<double> alphas;
    std::vector<double> fraction;        // per alpha
    std::vector<double> zero_hit_fraction;
    std::int64_t reps = 0;
    std::int64_t monotone_violations = 0;  // replicas where a larger alpha hit but a smaller did not
};

/// Fraction of SLE_kappa(rho_kappa(alpha)) paths whose gap X = W - V either hits 0 or
/// falls below delta * sqrt(kappa t) on [10 dt, T]. All alphas share one noise source.
HitStatistic boundary_hit_statistic(double kappa, const std::vector<double>& alphas, double T, double dt,
                                    double delta, std::int64_t reps, std::uint64_t seed, int grid_steps = 2000,
                                    Execution mode = Execution::Parallel);

/// Probability that a squared Bessel bridge of dimension d in (0,2) from x to y over time dt hits 0.
double besq_bridge_hit_probability(double d, double x, double y, double dt);

struct RestrictionResult {
    double p_hat = 0.0;
    double stderr_p = 0.0;
    double p_exact = 0.0;
    std::int64_t reps = 0;
};

/// (1 - delta^2/x0^2)^alpha.
double restriction_exact(double alpha, double x0, double delta);
/// Möbius map z -> i(1-z)/(1+z) from the disk to the upper half-plane (lower arc -> negative axis).
Complex disk_to_half_plane(Complex z);

/// Exact avoidance probability for the lattice version of restriction_check at mesh n,
/// exp(-pi alpha m_n) with m_n the lower-to-lower excursion mass hitting the pulled-back A.
double restriction_discrete_exact(double alpha, double x0, double delta, int n);

/// Avoidance of A = H cap B(x0, delta) by lattice excursions at intensity pi*alpha that
/// start and end on the lower arc, transported to H by disk_to_half_plane.
RestrictionResult restriction_check(double alpha, double x0, double delta, std::int64_t reps, std::uint64_t seed,
                                    int n = 64, Execution mode = Execution::Parallel);

}  // namespace diskperc
