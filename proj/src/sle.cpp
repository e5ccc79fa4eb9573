#include "diskperc/sle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <boost/math/special_functions/bessel.hpp>

#include "diskperc/excursions.hpp"
#include "diskperc/lattice.hpp"
#include "diskperc/potential.hpp"

namespace diskperc {

double rho_kappa_alpha(double kappa, double alpha) {
    if (!(kappa >= 8.0 / 3.0 - 1e-12 && kappa <= 4.0 + 1e-12)) throw std::domain_error("rho_kappa_alpha: kappa must lie in [8/3, 4]");
    if (!(alpha > 0.0)) throw std::domain_error("rho_kappa_alpha: alpha must be > 0");
    return (-8.0 + kappa + std::sqrt(16.0 + kappa * (16.0 * alpha - 8.0) + kappa * kappa)) / 2.0;
}

double lambda_kappa(double kappa) {
    if (!(kappa > 0.0)) throw std::domain_error("lambda_kappa: kappa must be > 0");
    return (8.0 - 3.0 * kappa) * (kappa - 6.0) / (4.0 * kappa);
}

double alpha_from_rho(double kappa, double rho) { return (rho + 2.0) * (rho + 6.0 - kappa) / (4.0 * kappa); }

double bessel_dimension(double kappa, double rho) { return 1.0 + 2.0 * (rho + 2.0) / kappa; }

namespace {

// Exact squared-Bessel transition: Y' = dt * noncentral chi^2_d(Y/dt), as a Poisson mixture of gammas.
double besq_step(double d, double y, double dt, CounterRng& rng) {
    const double n = static_cast<double>(rng.poisson(y / (2.0 * dt)));
    return 2.0 * dt * rng.gamma(d / 2.0 + n, 1.0);
}

}  // namespace

DrivingPath sample_driving(double kappa, double rho, double T, double dt, CounterRng& rng, DrivingScheme scheme) {
    if (!(rho > -2.0)) throw std::domain_error("sample_driving: rho must be > -2");
    if (!(kappa > 0.0 && T > 0.0 && dt > 0.0 && dt <= T)) throw std::invalid_argument("sample_driving: need kappa, T, dt > 0");
    const auto K = static_cast<std::size_t>(std::llround(T / dt));
    const double d = bessel_dimension(kappa, rho);
    const double sk = std::sqrt(kappa);
    const double floor_x = 0.5 * std::sqrt(kappa * dt);

    DrivingPath p;
    p.kappa = kappa;
    p.rho = rho;
    p.t.resize(K + 1);
    p.W.assign(K + 1, 0.0);
    p.V.assign(K + 1, 0.0);
    double y = 0.0;  // squared Bessel value of X / sqrt(kappa)
    double x = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        p.t[k + 1] = static_cast<double>(k + 1) * dt;
        double x_next;
        if (scheme == DrivingScheme::ExactBessel || k == 0) {
            y = besq_step(d, y, dt, rng);
            x_next = sk * std::sqrt(y);
        } else {
            const double xd = std::max(x, floor_x);
            x_next = std::abs(x + (rho + 2.0) * dt / xd + sk * std::sqrt(dt) * rng.normal());
            y = x_next * x_next / kappa;
        }
        // dV = -2 dt / X, averaged over the step
        const double xbar = std::max(0.5 * (x + x_next), floor_x);
        p.V[k + 1] = p.V[k] - 2.0 * dt / xbar;
        p.W[k + 1] = p.V[k + 1] + x_next;
        x = x_next;
    }
    return p;
}

DrivingPath driving_from_samples(std::vector<double> W, double dt) {
    DrivingPath p;
    p.t.resize(W.size());
    for (std::size_t k = 0; k < W.size(); ++k) p.t[k] = static_cast<double>(k) * dt;
    p.V.assign(W.size(), -std::numeric_limits<double>::infinity());
    p.W = std::move(W);
    return p;
}

namespace {

// Inverse of the slit map for constant driving w0 over time dt, branch in the closed upper half-plane.
Complex slit_inverse(Complex z, double w0, double dt) {
    const Complex a = z - w0;
    Complex s = std::sqrt(a * a - 4.0 * dt);
    if (s.imag() < 0.0) s = -s;
    if (s.imag() == 0.0 && a.real() * s.real() < 0.0) s = -s;
    return w0 + s;
}

Complex slit_forward(Complex z, double w0, double dt) {
    const Complex a = z - w0;
    Complex s = std::sqrt(a * a + 4.0 * dt);
    if (s.imag() < 0.0) s = -s;
    if (s.imag() == 0.0 && a.real() * s.real() < 0.0) s = -s;
    return w0 + s;
}

double distance_to_negative_axis(Complex p) { return p.real() >= 0.0 ? std::abs(p) : std::max(0.0, p.imag()); }

}  // namespace

LoewnerTrace solve_trace(const DrivingPath& driving, int stride) {
    if (stride < 1) throw std::invalid_argument("solve_trace: stride must be >= 1");
    if (driving.W.empty()) throw std::invalid_argument("solve_trace: empty driving path");
    LoewnerTrace tr;
    tr.points.push_back(driving.W[0]);
    tr.t.push_back(driving.t[0]);
    double dmin = distance_to_negative_axis(driving.W[0]);
    tr.dist_negative_axis.push_back(dmin);
    const std::size_t K = driving.W.size() - 1;
    for (std::size_t k = stride; k <= K; k += static_cast<std::size_t>(stride)) {
        Complex z = driving.W[k];
        for (std::size_t j = k; j >= 1; --j) z = slit_inverse(z, driving.W[j], driving.t[j] - driving.t[j - 1]);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            tr.overflow = true;
            break;
        }
        tr.points.push_back(z);
        tr.t.push_back(driving.t[k]);
        dmin = std::min(dmin, distance_to_negative_axis(z));
        tr.dist_negative_axis.push_back(dmin);
    }
    return tr;
}

Unzipped unzip(const std::vector<Complex>& trace) {
    Unzipped out;
    std::vector<Complex> c(trace.begin(), trace.end());
    for (std::size_t k = 1; k < c.size(); ++k) {
        const double w = c[k].real();
        const double dt = c[k].imag() * c[k].imag() / 4.0;
        out.W.push_back(w);
        out.dt.push_back(dt);
        for (std::size_t j = k + 1; j < c.size(); ++j) c[j] = slit_forward(c[j], w, dt);
    }
    return out;
}

double half_plane_capacity(const DrivingPath& driving, std::size_t k) {
    if (k >= driving.W.size()) throw std::out_of_range("half_plane_capacity: step out of range");
    double R = 1.0;
    for (std::size_t j = 0; j <= k; ++j) R = std::max(R, std::abs(driving.W[j]) + 2.0 * std::sqrt(driving.t[k]));
    // f(iY) = iY + i a / Y + O(Y^-2); Richardson over Y and 2Y removes the next term.
    auto probe = [&](double Y) {
        Complex z(0.0, Y);
        for (std::size_t j = k; j >= 1; --j) z = slit_inverse(z, driving.W[j], driving.t[j] - driving.t[j - 1]);
        return Y * (z.imag() - Y);
    };
    const double Y = 200.0 * R;
    const double a1 = probe(Y), a2 = probe(2.0 * Y);
    return (4.0 * a2 - a1) / 3.0;
}

double besq_bridge_hit_probability(double d, double x, double y, double dt) {
    if (d >= 2.0) return 0.0;
    if (x <= 0.0 || y <= 0.0) return 1.0;
    const double a = 1.0 - d / 2.0;   // |nu|
    const double z = std::sqrt(x * y) / dt;
    const double c = 2.0 / std::numbers::pi * std::sin(a * std::numbers::pi);
    if (z > 50.0) {
        // K_a / I_a ~ pi e^{-2z}
        const double ratio = c * std::numbers::pi * std::exp(-2.0 * z);
        return ratio / (1.0 + ratio);
    }
    // I_{-a} = I_a + c K_a; the killed bridge density carries I_a.
    const double ia = boost::math::cyl_bessel_i(a, z);
    const double ka = boost::math::cyl_bessel_k(a, z);
    return c * ka / (ia + c * ka);
}

HitStatistic boundary_hit_statistic(double kappa, const std::vector<double>& alphas, double T, double dt,
                                    double delta, std::int64_t reps, std::uint64_t seed, int grid_steps,
                                    Execution mode) {
    if (alphas.empty()) throw std::invalid_argument("boundary_hit_statistic: no alpha values");
    if (!std::is_sorted(alphas.begin(), alphas.end())) throw std::invalid_argument("boundary_hit_statistic: alphas must be increasing");
    const double t0 = 10.0 * dt;
    if (!(t0 < T)) throw std::invalid_argument("boundary_hit_statistic: need 10 dt < T");
    const std::size_t A = alphas.size();
    std::vector<double> dims(A);
    for (std::size_t j = 0; j < A; ++j) dims[j] = bessel_dimension(kappa, rho_kappa_alpha(kappa, alphas[j]));
    const double q = std::pow(T / t0, 1.0 / grid_steps);

    struct Out {
        std::vector<std::uint8_t> hit, zero;
    };
    const auto res = run_replicas<Out>(
        reps, seed,
        [&](std::int64_t, CounterRng& rng) {
            Out o;
            o.hit.assign(A, 0);
            o.zero.assign(A, 0);
            // Y_j = sum of independent squared-Bessel pieces with dimensions dims[0], dims[1]-dims[0], ...
            std::vector<double> piece(A), y(A), y_next(A);
            for (std::size_t j = 0; j < A; ++j) {
                const double dd = j == 0 ? dims[0] : dims[j] - dims[j - 1];
                piece[j] = dd > 0.0 ? 2.0 * t0 * rng.gamma(dd / 2.0, 1.0) : 0.0;
            }
            double t = t0;
            auto accumulate = [&](std::vector<double>& out) {
                double s = 0.0;
                for (std::size_t j = 0; j < A; ++j) out[j] = (s += piece[j]);
            };
            accumulate(y);
            auto check_close = [&](const std::vector<double>& yy, double time) {
                for (std::size_t j = 0; j < A; ++j)
                    if (std::sqrt(yy[j] / time) <= delta) o.hit[j] = 1;
            };
            check_close(y, t);
            for (int s = 0; s < grid_steps; ++s) {
                const double t_next = (s + 1 == grid_steps) ? T : t * q;
                const double h = t_next - t;
                for (std::size_t j = 0; j < A; ++j) {
                    const double dd = j == 0 ? dims[0] : dims[j] - dims[j - 1];
                    if (dd > 0.0) piece[j] = besq_step(dd, piece[j], h, rng);
                }
                accumulate(y_next);
                const double u = rng.uniform();
                for (std::size_t j = 0; j < A; ++j) {
                    if (!o.zero[j] && u < besq_bridge_hit_probability(dims[j], y[j], y_next[j], h)) o.zero[j] = 1;
                }
                y.swap(y_next);
                t = t_next;
                check_close(y, t);
            }
            for (std::size_t j = 0; j < A; ++j) o.hit[j] |= o.zero[j];
            return o;
        },
        mode);

    HitStatistic hs;
    hs.alphas = alphas;
    hs.reps = reps;
    hs.fraction.assign(A, 0.0);
    hs.zero_hit_fraction.assign(A, 0.0);
    for (const auto& o : res) {
        for (std::size_t j = 0; j < A; ++j) {
            hs.fraction[j] += o.hit[j];
            hs.zero_hit_fraction[j] += o.zero[j];
            if (j > 0 && o.hit[j] && !o.hit[j - 1]) ++hs.monotone_violations;
        }
    }
    if (reps > 0) {
        for (std::size_t j = 0; j < A; ++j) {
            hs.fraction[j] /= static_cast<double>(reps);
            hs.zero_hit_fraction[j] /= static_cast<double>(reps);
        }
    }
    return hs;
}

double restriction_exact(double alpha, double x0, double delta) {
    if (!(delta > 0.0 && delta < x0)) throw std::domain_error("restriction_exact: need 0 < delta < x0");
    return std::pow(1.0 - delta * delta / (x0 * x0), alpha);
}

Complex disk_to_half_plane(Complex z) { return Complex(0.0, 1.0) * (1.0 - z) / (1.0 + z); }

namespace {

VertexSet pulled_back_semidisk(const LatticeDisk& lat, double x0, double delta) {
    VertexSet out = lat.none();
    for (int v = 0; v < lat.vertex_count(); ++v) {
        const Point p = lat.position(v);
        if (std::abs(disk_to_half_plane({p.x, p.y}) - x0) < delta) out.insert(v);
    }
    return out;
}

std::vector<std::uint8_t> lower_arc_edges(const LatticeDisk& lat) {
    std::vector<std::uint8_t> lower(static_cast<std::size_t>(lat.boundary_edge_count()), 0);
    for (int b = 0; b < lat.boundary_edge_count(); ++b) {
        const BoundaryEdge& e = lat.boundary_edges()[static_cast<std::size_t>(b)];
        lower[static_cast<std::size_t>(b)] = lat.outer_boundary()[static_cast<std::size_t>(e.boundary)].j < 0 ? 1 : 0;
    }
    return lower;
}

}  // namespace

double restriction_discrete_exact(double alpha, double x0, double delta, int n) {
    restriction_exact(alpha, x0, delta);  // argument checks
    const LatticeDisk lat(n);
    const DirichletSolver solver(lat, {.cache_columns = 0});
    const auto lower = lower_arc_edges(lat);
    const int N = lat.vertex_count();
    // f(x) = P_x(exit through the lower arc) solves L f = (# lower boundary edges at x).
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    for (int e = 0; e < lat.boundary_edge_count(); ++e)
        if (lower[static_cast<std::size_t>(e)]) b[lat.boundary_edges()[static_cast<std::size_t>(e)].vertex] += 1.0;
    const Eigen::VectorXd f = solver.solve(b);
    // g(x) = P_x(hit A, then exit through the lower arc): harmonic off A, equal to f on A.
    const VertexSet A = pulled_back_semidisk(lat, x0, delta);
    const VertexSet rest = A.complement();
    std::vector<int> local;
    const SpMat Lr = dirichlet_laplacian(lat, &rest, &local);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Lr.rows());
    for (int v = 0; v < N; ++v) {
        if (local[static_cast<std::size_t>(v)] < 0) continue;
        for (NeighbourCode c : lat.neighbours(v))
            if (!is_boundary_code(c) && A.contains(c)) rhs[local[static_cast<std::size_t>(v)]] += f[c];
    }
    Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt(Lr);
    const Eigen::VectorXd g = llt.solve(rhs);
    double mass = 0.0;
    for (int e = 0; e < lat.boundary_edge_count(); ++e) {
        if (!lower[static_cast<std::size_t>(e)]) continue;
        const int v = lat.boundary_edges()[static_cast<std::size_t>(e)].vertex;
        mass += A.contains(v) ? f[v] : g[local[static_cast<std::size_t>(v)]];
    }
    return std::exp(-std::numbers::pi * alpha * mass);
}

RestrictionResult restriction_check(double alpha, double x0, double delta, std::int64_t reps, std::uint64_t seed, int n,
                                    Execution mode) {
    RestrictionResult out;
    out.p_exact = restriction_exact(alpha, x0, delta);
    out.reps = reps;
    if (reps <= 0) return out;
    if (!(alpha > 0.0)) throw std::domain_error("restriction_check: alpha must be > 0");

    const LatticeDisk lat(n);
    // Pull A back to the disk; the lower arc (Im z < 0) is sent onto the negative axis,
    // e^{i theta} -> tan(theta/2).
    const VertexSet pulled = pulled_back_semidisk(lat, x0, delta);
    const auto lower = lower_arc_edges(lat);
    std::vector<int> lower_edges;
    for (int b = 0; b < lat.boundary_edge_count(); ++b)
        if (lower[static_cast<std::size_t>(b)]) lower_edges.push_back(b);
    const double u = std::numbers::pi * alpha;

    const auto avoid = run_replicas<std::uint8_t>(
        reps, seed,
        [&](std::int64_t, CounterRng& rng) -> std::uint8_t {
            // Excursions entering through the lower arc, thinned to those also leaving through it.
            const std::uint64_t N = rng.poisson(u * static_cast<double>(lower_edges.size()));
            DirectionStream dirs(rng);
            for (std::uint64_t k = 0; k < N; ++k) {
                const int b = lower_edges[rng.below(lower_edges.size())];
                bool touched = false;
                const int exit = walk_to_boundary(lat, lat.boundary_edges()[static_cast<std::size_t>(b)].vertex, dirs,
                                                  [&](int v) { touched |= pulled.contains(v); });
                if (touched && lower[static_cast<std::size_t>(exit)]) return 0;
            }
            return 1;
        },
        mode);
    std::int64_t s = 0;
    for (auto a : avoid) s += a;
    out.p_hat = static_cast<double>(s) / static_cast<double>(reps);
    out.stderr_p = std::sqrt(out.p_hat * (1 - out.p_hat) / static_cast<double>(reps));
    return out;
}

}  // namespace diskperc
