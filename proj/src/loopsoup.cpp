#include "diskperc/loopsoup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "diskperc/potential.hpp"

namespace diskperc {

namespace {

void dissect(const LatticeDisk& lat, std::vector<int>& ids, std::vector<int>& out) {
    if (ids.size() <= 4) {
        out.insert(out.end(), ids.begin(), ids.end());
        return;
    }
    int lo_i = INT32_MAX, hi_i = INT32_MIN, lo_j = INT32_MAX, hi_j = INT32_MIN;
    for (int v : ids) {
        const Site s = lat.site(v);
        lo_i = std::min(lo_i, s.i);
        hi_i = std::max(hi_i, s.i);
        lo_j = std::min(lo_j, s.j);
        hi_j = std::max(hi_j, s.j);
    }
    const bool split_i = (hi_i - lo_i) >= (hi_j - lo_j);
    auto coord = [&](int v) { return split_i ? lat.site(v).i : lat.site(v).j; };
    std::vector<int> cs;
    cs.reserve(ids.size());
    for (int v : ids) cs.push_back(coord(v));
    std::nth_element(cs.begin(), cs.begin() + static_cast<std::ptrdiff_t>(cs.size() / 2), cs.end());
    const int mid = cs[cs.size() / 2];

    std::vector<int> left, right, sep;
    for (int v : ids) {
        const int c = coord(v);
        (c < mid ? left : c > mid ? right : sep).push_back(v);
    }
    if (left.empty() && right.empty()) {
        out.insert(out.end(), sep.begin(), sep.end());
        return;
    }
    dissect(lat, left, out);
    dissect(lat, right, out);
    out.insert(out.end(), sep.begin(), sep.end());
}

// Logarithmic-series law P(J=j) = r^j / (j log(1/(1-r))), by Kemp's method.
std::int64_t log_series(double r, CounterRng& rng) {
    const double v = rng.uniform();
    if (v >= r) return 1;
    const double q = -std::expm1(rng.uniform() * std::log1p(-r));
    if (v >= q) return 1;
    return 1 + static_cast<std::int64_t>(std::floor(std::log(v) / std::log(q)));
}

}  // namespace

std::vector<int> nested_dissection_order(const LatticeDisk& lattice) {
    std::vector<int> ids(static_cast<std::size_t>(lattice.vertex_count()));
    for (int v = 0; v < lattice.vertex_count(); ++v) ids[static_cast<std::size_t>(v)] = v;
    std::vector<int> out;
    out.reserve(ids.size());
    dissect(lattice, ids, out);
    return out;
}

LoopSoupPlan::LoopSoupPlan(const LatticeDisk& lattice, PeelOrder order) : lattice_(lattice) {
    const int N = lattice.vertex_count();
    std::vector<int> elim;
    if (order == PeelOrder::NestedDissection) {
        elim = nested_dissection_order(lattice);
    } else {
        elim.resize(static_cast<std::size_t>(N));
        for (int v = 0; v < N; ++v) elim[static_cast<std::size_t>(v)] = v;
    }
    // Peeling runs backwards through the elimination order: the vertex eliminated
    // last is peeled first, so H(x) is exactly the leading block up to x.
    peel_.assign(elim.rbegin(), elim.rend());
    rank_.assign(static_cast<std::size_t>(N), -1);
    for (int k = 0; k < N; ++k) rank_[static_cast<std::size_t>(peel_[static_cast<std::size_t>(k)])] = k;

    std::vector<int> pos(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) pos[static_cast<std::size_t>(elim[static_cast<std::size_t>(k)])] = k;
    std::vector<Eigen::Triplet<double>> trips;
    for (int v = 0; v < N; ++v) {
        const int a = pos[static_cast<std::size_t>(v)];
        trips.emplace_back(a, a, 4.0);
        for (NeighbourCode c : lattice.neighbours(v))
            if (!is_boundary_code(c)) trips.emplace_back(a, pos[static_cast<std::size_t>(c)], -1.0);
    }
    SpMat L(N, N);
    L.setFromTriplets(trips.begin(), trips.end());
    // Pivot k of the unpivoted LDL^T is the Schur complement onto k of the leading
    // block, i.e. 1 / G_H(x,x) with G_H(x,x) = 1 / (4 (1 - r)).
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt(L);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("LoopSoupPlan: factorization failed");
    const Eigen::VectorXd D = ldlt.vectorD();
    r_.assign(static_cast<std::size_t>(N), 0.0);
    for (int k = 0; k < N; ++k) r_[static_cast<std::size_t>(elim[static_cast<std::size_t>(k)])] = std::max(0.0, 1.0 - D[k] / 4.0);
}

std::vector<int> LoopSoupSample::cluster_sizes() const {
    std::map<int, int> sizes;
    for (int c : cluster)
        if (c >= 0) ++sizes[c];
    std::vector<int> out;
    for (auto [id, s] : sizes) out.push_back(s);
    return out;
}

namespace {

void assign_clusters(const LatticeDisk& lattice, LoopSoupSample& soup) {
    UnionFind uf(lattice.vertex_count());
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(lattice.vertex_count()), 0);
    for (const auto& loop : soup.loops) {
        for (int v : loop.vertices) {
            covered[static_cast<std::size_t>(v)] = 1;
            uf.unite(loop.vertices.front(), v);
        }
    }
    soup.cluster.assign(static_cast<std::size_t>(lattice.vertex_count()), -1);
    for (int v = 0; v < lattice.vertex_count(); ++v)
        if (covered[static_cast<std::size_t>(v)]) soup.cluster[static_cast<std::size_t>(v)] = uf.find(v);
}

}  // namespace

LoopSoupSample sample_loop_soup(const LoopSoupPlan& plan, double lambda, CounterRng& rng) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_loop_soup: lambda must be > 0");
    const LatticeDisk& lat = plan.lattice();
    LoopSoupSample soup;
    soup.lambda = lambda;
    DirectionStream dirs(rng);
    std::vector<int> excursion;

    for (int x : plan.peel_order()) {
        const double r = plan.return_probability(x);
        if (r <= 0.0) continue;
        const std::uint64_t count = rng.poisson(lambda * -std::log1p(-r));
        const int floor_rank = plan.rank(x);
        for (std::uint64_t c = 0; c < count; ++c) {
            DiscreteLoop loop;
            loop.base = x;
            const std::int64_t J = log_series(r, rng);
            for (std::int64_t j = 0; j < J; ++j) {
                // Rejection: an unconditioned walk from x that comes back to x
                // before leaving H(x) is a conditioned excursion.
                for (;;) {
                    excursion.assign(1, x);
                    int v = x;
                    bool returned = false;
                    for (;;) {
                        const NeighbourCode nb = lat.neighbour(v, dirs.next());
                        if (is_boundary_code(nb) || plan.rank(nb) < floor_rank) break;
                        if (nb == x) {
                            returned = true;
                            break;
                        }
                        excursion.push_back(nb);
                        v = nb;
                    }
                    if (returned) break;
                }
                loop.vertices.insert(loop.vertices.end(), excursion.begin(), excursion.end());
            }
            soup.loops.push_back(std::move(loop));
        }
    }
    assign_clusters(lat, soup);
    return soup;
}

namespace {

Eigen::MatrixXd transition_matrix(const LatticeDisk& lattice) {
    const int N = lattice.vertex_count();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    for (int v = 0; v < N; ++v)
        for (NeighbourCode c : lattice.neighbours(v))
            if (!is_boundary_code(c)) P(v, c) += 0.25;
    return P;
}

}  // namespace

std::vector<double> loop_length_mass(const LatticeDisk& lattice, double lambda, int max_len) {
    const Eigen::MatrixXd P = transition_matrix(lattice);
    Eigen::MatrixXd Pm = Eigen::MatrixXd::Identity(P.rows(), P.cols());
    std::vector<double> mass(static_cast<std::size_t>(max_len) + 1, 0.0);
    for (int m = 1; m <= max_len; ++m) {
        Pm = Pm * P;
        mass[static_cast<std::size_t>(m)] = lambda * Pm.trace() / m;
    }
    return mass;
}

LoopOracleResult loop_rejection_oracle(const LatticeDisk& lattice, double lambda, int max_len, CounterRng& rng) {
    if (lattice.vertex_count() > 100) throw std::invalid_argument("loop_rejection_oracle: lattice too large (> 100 vertices)");
    if (max_len < 2 || max_len > 20) throw std::invalid_argument("loop_rejection_oracle: need 2 <= max_len <= 20");
    if (!(lambda > 0.0)) throw std::invalid_argument("loop_rejection_oracle: lambda must be > 0");

    const Eigen::MatrixXd P = transition_matrix(lattice);
    const int N = lattice.vertex_count();
    LoopOracleResult res;
    res.sample.lambda = lambda;

    // Tail mass beyond max_len from the spectral bound of the killed chain.
    {
        Eigen::MatrixXd Pm = Eigen::MatrixXd::Identity(N, N);
        for (int m = 1; m <= 4000; ++m) {
            Pm = Pm * P;
            const double w = lambda * Pm.trace() / m;
            (m <= max_len ? res.retained_mass : res.truncated_mass) += w;
            if (m > max_len && w < 1e-18) break;
        }
    }

    DirectionStream dirs(rng);
    std::vector<Eigen::MatrixXd> powers{Eigen::MatrixXd::Identity(N, N)};
    for (int m = 1; m <= max_len; ++m) powers.push_back(powers.back() * P);
    std::vector<int> path;
    for (int x = 0; x < N; ++x) {
        for (int m = 2; m <= max_len; m += 2) {
            const double q = powers[static_cast<std::size_t>(m)](x, x);
            const std::uint64_t count = rng.poisson(lambda * q / m);
            for (std::uint64_t c = 0; c < count; ++c) {
                for (;;) {
                    path.assign(1, x);
                    int v = x;
                    bool alive = true;
                    for (int s = 0; s < m; ++s) {
                        const NeighbourCode nb = lattice.neighbour(v, dirs.next());
                        if (is_boundary_code(nb)) {
                            alive = false;
                            break;
                        }
                        v = nb;
                        if (s + 1 < m) path.push_back(v);
                    }
                    if (alive && v == x) break;
                }
                DiscreteLoop loop;
                const auto shift = static_cast<std::ptrdiff_t>(rng.below(static_cast<std::uint64_t>(m)));
                std::rotate(path.begin(), path.begin() + shift, path.end());
                loop.vertices = path;
                loop.base = *std::min_element(path.begin(), path.end());
                res.sample.loops.push_back(std::move(loop));
            }
        }
    }
    assign_clusters(lattice, res.sample);
    return res;
}

VertexSet combined_occupied(const LatticeDisk& lattice, const VertexSet& excursion_trace, const LoopSoupSample& soup) {
    const int N = lattice.vertex_count();
    if (excursion_trace.size() != N || (!soup.cluster.empty() && static_cast<int>(soup.cluster.size()) != N))
        throw std::invalid_argument("combined_occupied: lattice mismatch");
    VertexSet out = excursion_trace;
    if (soup.cluster.empty()) return out;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(N), 0);
    for (int v = 0; v < N; ++v) {
        const int c = soup.cluster[static_cast<std::size_t>(v)];
        if (c >= 0 && excursion_trace.contains(v)) hit[static_cast<std::size_t>(c)] = 1;
    }
    for (int v = 0; v < N; ++v) {
        const int c = soup.cluster[static_cast<std::size_t>(v)];
        if (c >= 0 && hit[static_cast<std::size_t>(c)]) out.insert(v);
    }
    return out;
}

}  // namespace diskperc
