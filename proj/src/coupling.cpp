#include "diskperc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/ellint_1.hpp>

#include "diskperc/potential.hpp"
#include "diskperc/stats.hpp"

namespace diskperc {

namespace {

double log_choose(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Inverse cdf over the window mean +- 12 sd (the mass outside is below 1e-30),
// stepping through the pmf with its ratio p(s+1)/p(s).
template <class LogPmf, class Ratio>
std::int64_t window_quantile(std::int64_t lo, std::int64_t hi, double mean, double sd, double u, LogPmf&& log_pmf,
                             Ratio&& ratio) {
    const auto wlo = std::max(lo, static_cast<std::int64_t>(std::floor(mean - 12.0 * sd - 1.0)));
    const auto whi = std::min(hi, static_cast<std::int64_t>(std::ceil(mean + 12.0 * sd + 1.0)));
    double p = std::exp(log_pmf(wlo));
    double cdf = p;
    std::int64_t s = wlo;
    while (cdf < u && s < whi) {
        p *= ratio(s);
        ++s;
        cdf += p;
    }
    return s;
}

}  // namespace

std::int64_t binomial_half_quantile(std::int64_t n, double u) {
    const double nn = static_cast<double>(n);
    return window_quantile(
        0, n, nn / 2.0, std::sqrt(nn) / 2.0, u,
        [&](std::int64_t s) { return log_choose(nn, static_cast<double>(s)) - nn * std::numbers::ln2; },
        [&](std::int64_t s) { return static_cast<double>(n - s) / static_cast<double>(s + 1); });
}

std::int64_t hypergeometric_quantile(std::int64_t total, std::int64_t good, std::int64_t draws, double u) {
    const std::int64_t lo = std::max<std::int64_t>(0, draws - (total - good));
    const std::int64_t hi = std::min(good, draws);
    if (lo >= hi) return lo;
    const double T = static_cast<double>(total), G = static_cast<double>(good), D = static_cast<double>(draws);
    const double mean = D * G / T;
    const double var = total > 1 ? D * (G / T) * (1 - G / T) * (T - D) / (T - 1) : 0.0;
    const double denom = log_choose(T, D);
    return window_quantile(
        lo, hi, mean, std::sqrt(var), u,
        [&](std::int64_t j) {
            const double jj = static_cast<double>(j);
            return log_choose(G, jj) + log_choose(T - G, D - jj) - denom;
        },
        [&](std::int64_t j) {
            return static_cast<double>((good - j) * (draws - j)) /
                   static_cast<double>((j + 1) * (total - good - draws + j + 1));
        });
}

double PairedPath::deviation() const {
    double d = 0.0;
    for (std::size_t k = 0; k < Y.size() && k < B.size(); ++k) d = std::max(d, std::abs(B[k] - Y[k]));
    return d;
}

namespace {

struct Block {
    std::vector<double> B;
    std::vector<std::int64_t> Y;
};

Block dyadic_block(std::int64_t N, CounterRng& rng) {
    Block blk;
    blk.B.assign(static_cast<std::size_t>(N) + 1, 0.0);
    blk.Y.assign(static_cast<std::size_t>(N) + 1, 0);
    auto& B = blk.B;
    auto& Y = blk.Y;
    double z = rng.normal();
    B[static_cast<std::size_t>(N)] = std::sqrt(static_cast<double>(N)) * z;
    Y[static_cast<std::size_t>(N)] = 2 * binomial_half_quantile(N, phi_cdf(z)) - N;
    for (std::int64_t len = N; len >= 2; len /= 2) {
        const std::int64_t half = len / 2;
        const double sd = std::sqrt(static_cast<double>(len) / 4.0);
        for (std::int64_t a = 0; a < N; a += len) {
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(a + len),
                       im = static_cast<std::size_t>(a + half);
            const std::int64_t ups = (Y[ib] - Y[ia] + len) / 2;
            z = rng.normal();
            B[im] = 0.5 * (B[ia] + B[ib]) + sd * z;
            const std::int64_t j = hypergeometric_quantile(len, ups, half, phi_cdf(z));
            Y[im] = Y[ia] + 2 * j - half;
        }
    }
    return blk;
}

std::int64_t next_pow2(std::int64_t x) {
    std::int64_t p = 1;
    while (p < x) p *= 2;
    return p;
}

}  // namespace

PairedPath dyadic_coupling_1d(std::int64_t horizon, CounterRng& rng) {
    if (horizon < 2) throw std::invalid_argument("dyadic_coupling_1d: horizon must be >= 2");
    Block blk = dyadic_block(next_pow2(horizon), rng);
    PairedPath p;
    p.B.assign(blk.B.begin(), blk.B.begin() + horizon + 1);
    p.Y.assign(blk.Y.begin(), blk.Y.begin() + horizon + 1);
    return p;
}

PairedPath skorokhod_coupling_1d(std::int64_t horizon, CounterRng& rng, double substep) {
    if (horizon < 2) throw std::invalid_argument("skorokhod_coupling_1d: horizon must be >= 2");
    PairedPath p;
    p.B.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    p.Y.assign(static_cast<std::size_t>(horizon) + 1, 0);
    const double s = std::sqrt(substep);
    double t = 0.0, b = 0.0;
    int level = 0;
    std::int64_t steps = 0;
    std::int64_t next_clock = 1;
    // Crossings between grid times are detected with the Brownian bridge law, so the
    // embedding clock is not delayed by discrete monitoring.
    auto bridge_cross = [&](double barrier, double b0, double b1) {
        const double a0 = std::abs(barrier - b0), a1 = std::abs(barrier - b1);
        return rng.uniform() < std::exp(-2.0 * a0 * a1 / substep);
    };
    while (steps < horizon || next_clock <= horizon) {
        const double b0 = b;
        t += substep;
        b += s * rng.normal();
        while (next_clock <= horizon && t >= static_cast<double>(next_clock)) {
            p.B[static_cast<std::size_t>(next_clock)] = b;
            ++next_clock;
        }
        if (steps >= horizon) continue;
        const double up = level + 1.0, down = level - 1.0;
        int move = 0;
        if (b >= up) move = 1;
        else if (b <= down) move = -1;
        else if (bridge_cross(up, b0, b)) move = 1;
        else if (bridge_cross(down, b0, b)) move = -1;
        if (move != 0) {
            level += move;
            ++steps;
            p.Y[static_cast<std::size_t>(steps)] = level;
        }
    }
    return p;
}

PairedPath coupling_1d(std::int64_t horizon, CounterRng& rng, CouplingMethod method) {
    return method == CouplingMethod::Dyadic ? dyadic_coupling_1d(horizon, rng) : skorokhod_coupling_1d(horizon, rng);
}

PlanarPair kmt_2d(int n, CounterRng& rng, Site walk_start, Point brownian_start, bool keep_paths) {
    if (n < 2) throw std::invalid_argument("kmt_2d: n must be >= 2");
    PlanarPair pp;
    pp.n = n;
    const double inv = 1.0 / n;
    const std::int64_t M = next_pow2(2LL * n * n);
    // Rotated coordinates: U = Y1 + Y2 and V = Y1 - Y2 are independent 1D walks.
    std::int64_t u0 = walk_start.i + walk_start.j, v0 = walk_start.i - walk_start.j;
    double w10 = (brownian_start.x + brownian_start.y) * n, w20 = (brownian_start.x - brownian_start.y) * n;
    std::int64_t k = 0;
    const long long n2 = static_cast<long long>(n) * n;
    auto record = [&](std::int64_t U, std::int64_t V, double W1, double W2) {
        const long long xi = (U + V) / 2, yj = (U - V) / 2;
        const Point x{static_cast<double>(xi) * inv, static_cast<double>(yj) * inv};
        const Point z{(W1 + W2) * 0.5 * inv, (W1 - W2) * 0.5 * inv};
        if (keep_paths) {
            pp.walk.push_back(x);
            pp.brownian.push_back(z);
        }
        if (pp.walk_exit < 0 && xi * xi + yj * yj >= n2) pp.walk_exit = k;
        if (pp.brownian_exit < 0 && z.x * z.x + z.y * z.y >= 1.0) pp.brownian_exit = k;
        if (pp.walk_exit < 0 && pp.brownian_exit < 0)
            pp.sup_deviation = std::max(pp.sup_deviation, std::hypot(x.x - z.x, x.y - z.y));
    };
    record(u0, v0, w10, w20);
    while (pp.walk_exit < 0 || pp.brownian_exit < 0) {
        const Block a = dyadic_block(M, rng);
        const Block b = dyadic_block(M, rng);
        for (std::int64_t s = 1; s <= M && (pp.walk_exit < 0 || pp.brownian_exit < 0); ++s) {
            ++k;
            const auto i = static_cast<std::size_t>(s);
            record(u0 + a.Y[i], v0 + b.Y[i], w10 + a.B[i], w20 + b.B[i]);
        }
        u0 += a.Y.back();
        v0 += b.Y.back();
        w10 += a.B.back();
        w20 += b.B.back();
    }
    return pp;
}

LastExitSample last_exit_sample(double r, int n, CounterRng& rng) {
    const PlanarPair pp = kmt_2d(n, rng);
    LastExitSample out;
    std::int64_t lw = -1, lb = -1;
    for (std::int64_t k = 0; k < pp.walk_exit; ++k)
        if (norm(pp.walk[static_cast<std::size_t>(k)]) < r) lw = k;
    for (std::int64_t k = 0; k < pp.brownian_exit; ++k)
        if (norm(pp.brownian[static_cast<std::size_t>(k)]) < r) lb = k;
    if (lw < 0 || lb < 0) return out;
    const Point x = pp.walk[static_cast<std::size_t>(lw)];
    const Point z = pp.brownian[static_cast<std::size_t>(lb)];
    out.gap = std::hypot(x.x - z.x, x.y - z.y);
    out.continuum_angle = std::atan2(z.y, z.x);
    out.valid = true;
    return out;
}

LastExitReport last_exit_gap(double r, int n, std::int64_t reps, std::uint64_t seed, const std::vector<double>& s_values,
                             Execution mode) {
    if (!(r > 0.5 && r < 1.0)) throw std::invalid_argument("last_exit_gap: need 1/2 < r < 1");
    const auto samples = run_replicas<LastExitSample>(
        reps, seed, [&](std::int64_t, CounterRng& rng) { return last_exit_sample(r, n, rng); }, mode);
    LastExitReport rep;
    rep.s_values = s_values;
    for (const auto& s : samples) {
        if (!s.valid) continue;
        rep.gaps.push_back(s.gap);
        rep.angles.push_back(s.continuum_angle);
    }
    const double scale = std::log(static_cast<double>(n)) / n;
    for (double s : s_values) {
        const auto over = std::count_if(rep.gaps.begin(), rep.gaps.end(), [&](double g) { return g > s * scale; });
        rep.exceedance.push_back(rep.gaps.empty() ? 0.0 : static_cast<double>(over) / static_cast<double>(rep.gaps.size()));
    }
    return rep;
}

double continuum_cap_segment(double a, double b) {
    if (!(-1.0 < a && a < b && b < 1.0)) throw std::domain_error("continuum_cap_segment: need -1 < a < b < 1");
    // A disk automorphism sends [a,b] to [0,c]; D minus [0,c] is the Grötzsch ring.
    const double c = (b - a) / (1.0 - a * b);
    const double mu = std::numbers::pi / 2.0 * boost::math::ellint_1(std::sqrt(1.0 - c * c)) / boost::math::ellint_1(c);
    return 2.0 * std::numbers::pi / mu;
}

VertexSet segment_vertices(const LatticeDisk& lattice, double a, double b) {
    VertexSet out = lattice.none();
    const int n = lattice.n();
    for (int i = static_cast<int>(std::ceil(a * n - 1e-9)); i <= static_cast<int>(std::floor(b * n + 1e-9)); ++i)
        if (auto v = lattice.vertex_at({i, 0})) out.insert(*v);
    return out;
}

std::vector<CapacityCurveRow> capacity_convergence_general(const std::string& shape, const std::vector<int>& ns, double a,
                                                           double b) {
    std::vector<CapacityCurveRow> rows;
    for (int n : ns) {
        const LatticeDisk lat(n);
        const DirichletSolver solver(lat, {.cache_columns = 0});
        CapacityCurveRow row;
        row.shape = shape;
        row.n = n;
        if (shape == "ball") {
            row.cap_discrete = capacity(solver, ball_vertices(lat, {0.0, 0.0}, a));
            row.cap_reference = continuum_cap_ball(a);
            row.error = std::abs(row.cap_discrete - row.cap_reference);
        } else if (shape == "segment") {
            const VertexSet K = segment_vertices(lat, a, b);
            // every point of [a,b] must lie within 2/n of K_n
            if (K.empty() || std::ceil(a * n) - a * n > 2.0 || b * n - std::floor(b * n) > 2.0)
                throw std::invalid_argument("capacity_convergence_general: segment escapes the 2/n fattening of K_n");
            row.cap_discrete = capacity(solver, K);
            row.cap_reference = continuum_cap_segment(a, b);
            row.error = std::abs(row.cap_discrete - row.cap_reference);
        } else if (shape == "deep-segment") {
            // radial segment reaching depth n^{-1/2}; error column holds cap / log n
            const VertexSet K = segment_vertices(lat, 0.0, 1.0 - 1.0 / std::sqrt(static_cast<double>(n)));
            row.cap_discrete = capacity(solver, K);
            row.cap_reference = std::numeric_limits<double>::quiet_NaN();
            row.error = row.cap_discrete / std::log(static_cast<double>(n));
        } else {
            throw std::invalid_argument("capacity_convergence_general: unknown shape '" + shape + "'");
        }
        rows.push_back(row);
    }
    return rows;
}

BeurlingResult beurling_check(int n, double R, const std::vector<int>& d_lattice, std::int64_t reps, std::uint64_t seed,
                              double length, Execution mode) {
    const long long L = std::llround(length * n);
    const double R2 = (R * n) * (R * n);
    if (static_cast<double>(L) <= R * n) throw std::invalid_argument("beurling_check: segment must be longer than R");
    const std::size_t D = d_lattice.size();
    const auto res = run_replicas<std::vector<std::uint8_t>>(
        reps, seed,
        [&](std::int64_t, CounterRng& rng) {
            std::vector<std::uint8_t> esc(D, 0);
            for (std::size_t j = 0; j < D; ++j) {
                CounterRng local = rng.split(0);  // common noise across distances
                DirectionStream dirs(local);
                const long long d = d_lattice[j];
                long long x = d, y = 0;
                for (;;) {
                    if (y == 0 && x <= 0 && x >= -L) break;
                    const double dx = static_cast<double>(x - d), dy = static_cast<double>(y);
                    if (dx * dx + dy * dy >= R2) {
                        esc[j] = 1;
                        break;
                    }
                    const Site st = kSteps[static_cast<std::size_t>(dirs.next())];
                    x += st.i;
                    y += st.j;
                }
            }
            return esc;
        },
        mode);
    BeurlingResult out;
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < D; ++j) {
        std::int64_t s = 0;
        for (const auto& e : res) s += e[j];
        const double p = reps > 0 ? static_cast<double>(s) / static_cast<double>(reps) : 0.0;
        out.distances.push_back(static_cast<double>(d_lattice[j]) / n);
        out.escape.push_back(p);
        out.stderr_escape.push_back(reps > 0 ? std::sqrt(p * (1 - p) / static_cast<double>(reps)) : 0.0);
        if (p > 0.0) {
            lx.push_back(std::log(out.distances.back()));
            ly.push_back(std::log(p));
        }
    }
    if (lx.size() >= 2) {
        const auto fit = stats::linear_fit(lx, ly);
        out.exponent = fit.slope;
        out.r2 = fit.r2;
    }
    return out;
}

namespace {

std::uint64_t poisson_quantile(double mean, double u) {
    double p = std::exp(-mean), cdf = p;
    std::uint64_t k = 0;
    while (cdf < u && k < 100000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

}  // namespace

ExcursionMatchReport excursion_match(double u, double r, int n, std::int64_t reps, std::uint64_t seed, Execution mode) {
    const LatticeDisk lat(n);
    const DirichletSolver solver(lat, {.cache_columns = 0});
    const EquilibriumMeasure e = equilibrium_measure(solver, ball_vertices(lat, {0.0, 0.0}, r));
    // Equilibrium measure of B_n(r) sorted by angle, for the quantile coupling with the uniform law on the circle.
    std::vector<std::pair<double, int>> by_angle;
    for (int v : e.support) {
        const Point p = lat.position(v);
        double th = std::atan2(p.y, p.x);
        if (th < 0) th += 2.0 * std::numbers::pi;
        by_angle.emplace_back(th, v);
    }
    std::sort(by_angle.begin(), by_angle.end());
    std::vector<double> cum;
    double acc = 0.0;
    for (auto& [th, v] : by_angle) cum.push_back(acc += e.weight[v] / e.capacity);
    const double cap_c = continuum_cap_ball(r);

    struct Out {
        std::uint8_t mismatch = 0;
        std::vector<double> start, dev;
    };
    const auto res = run_replicas<Out>(
        reps, seed,
        [&](std::int64_t, CounterRng& rng) {
            Out o;
            const double w = rng.uniform();
            const std::uint64_t nc = poisson_quantile(u * cap_c, w);
            const std::uint64_t nd = poisson_quantile(u * e.capacity, w);
            o.mismatch = nc != nd;
            for (std::uint64_t k = 0; k < std::min(nc, nd); ++k) {
                const double v = rng.uniform();
                const double th = 2.0 * std::numbers::pi * v;
                const Point zc{r * std::cos(th), r * std::sin(th)};
                const auto idx = static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), v) - cum.begin());
                const int xv = by_angle[std::min(idx, by_angle.size() - 1)].second;
                const Point xd = lat.position(xv);
                o.start.push_back(std::hypot(xd.x - zc.x, xd.y - zc.y));
                o.dev.push_back(kmt_2d(n, rng, lat.site(xv), zc, false).sup_deviation);
            }
            return o;
        },
        mode);
    ExcursionMatchReport rep;
    rep.reps = reps;
    std::int64_t mm = 0;
    for (const auto& o : res) {
        mm += o.mismatch;
        rep.start_distance.insert(rep.start_distance.end(), o.start.begin(), o.start.end());
        rep.path_deviation.insert(rep.path_deviation.end(), o.dev.begin(), o.dev.end());
    }
    rep.count_mismatch_rate = reps > 0 ? static_cast<double>(mm) / static_cast<double>(reps) : 0.0;
    return rep;
}

}  // namespace diskperc
