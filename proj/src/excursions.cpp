#include "diskperc/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace diskperc {

namespace {

constexpr double kUnvisited = std::numeric_limits<double>::infinity();

ExcursionCloud empty_cloud(const LatticeDisk& lattice, double u) {
    ExcursionCloud c;
    c.u = u;
    c.first_label.assign(static_cast<std::size_t>(lattice.vertex_count()), kUnvisited);
    return c;
}

void run_excursion(const LatticeDisk& lattice, int start, ExcursionRecord& rec, ExcursionCloud& cloud,
                   DirectionStream& dirs, const CloudOptions& opt) {
    rec.start_vertex = start;
    std::int64_t visits = 0;
    const double label = rec.label;
    rec.exit_edge = walk_to_boundary(lattice, start, dirs, [&](int v) {
        auto& fl = cloud.first_label[static_cast<std::size_t>(v)];
        fl = std::min(fl, label);
        ++visits;
        if (opt.store_paths) rec.path.push_back(v);
    });
    rec.steps = visits + 1;
}

void check_u(double u, const char* who) {
    if (!(u > 0.0)) throw std::invalid_argument(std::string(who) + ": intensity u must be > 0");
}

// Labels are i.i.d. uniform on [0,u] given the count; sorting them keeps the
// record order aligned with the single-walk sampler.
std::vector<double> sorted_labels(std::uint64_t count, double u, CounterRng& rng) {
    std::vector<double> labels(count);
    for (auto& l : labels) l = u * rng.uniform();
    std::sort(labels.begin(), labels.end());
    return labels;
}

}  // namespace

VertexSet ExcursionCloud::occupied_at(double level) const {
    VertexSet out(static_cast<int>(first_label.size()));
    for (std::size_t v = 0; v < first_label.size(); ++v)
        if (first_label[v] <= level) out.insert(static_cast<int>(v));
    return out;
}

ExcursionCloud ExcursionCloud::thinned(double level) const {
    ExcursionCloud out;
    out.u = level;
    out.first_label.assign(first_label.size(), kUnvisited);
    for (const auto& e : excursions)
        if (e.label <= level) out.excursions.push_back(e);
    for (std::size_t v = 0; v < first_label.size(); ++v)
        if (first_label[v] <= level) out.first_label[v] = first_label[v];
    return out;
}

ExcursionCloud sample_cloud_direct(const LatticeDisk& lattice, double u, CounterRng& rng, CloudOptions opt) {
    check_u(u, "sample_cloud_direct");
    ExcursionCloud cloud = empty_cloud(lattice, u);
    const auto nbe = static_cast<std::uint64_t>(lattice.boundary_edge_count());
    const auto labels = sorted_labels(rng.poisson(u * static_cast<double>(nbe)), u, rng);
    DirectionStream dirs(rng);
    cloud.excursions.resize(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        auto& rec = cloud.excursions[k];
        rec.label = labels[k];
        rec.entry_edge = static_cast<int>(rng.below(nbe));
        run_excursion(lattice, lattice.boundary_edges()[static_cast<std::size_t>(rec.entry_edge)].vertex, rec, cloud,
                      dirs, opt);
    }
    return cloud;
}

ExcursionCloud sample_hitting_K(const LatticeDisk& lattice, double u, const EquilibriumMeasure& eK, CounterRng& rng,
                                CloudOptions opt) {
    check_u(u, "sample_hitting_K");
    if (eK.support.empty()) throw std::invalid_argument("sample_hitting_K: K is empty");
    ExcursionCloud cloud = empty_cloud(lattice, u);
    std::vector<double> w;
    w.reserve(eK.support.size());
    for (int x : eK.support) w.push_back(eK.weight[x]);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const auto labels = sorted_labels(rng.poisson(u * eK.capacity), u, rng);
    DirectionStream dirs(rng);
    cloud.excursions.resize(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        auto& rec = cloud.excursions[k];
        rec.label = labels[k];
        run_excursion(lattice, eK.support[pick(rng)], rec, cloud, dirs, opt);
    }
    return cloud;
}

ExcursionCloud sample_cloud_single_walk(const LatticeDisk& lattice, double u, CounterRng& rng, CloudOptions opt) {
    if (u < 0.0) throw std::invalid_argument("sample_cloud_single_walk: u must be >= 0");
    ExcursionCloud cloud = empty_cloud(lattice, u);
    const auto nbe = static_cast<std::uint64_t>(lattice.boundary_edge_count());
    const double rate = static_cast<double>(nbe);
    DirectionStream dirs(rng);
    // Local time at the collapsed vertex: holding times are Exp(|BE|), one unit
    // of jump rate per boundary edge.
    double local_time = rng.exponential(rate);
    while (local_time <= u) {
        ExcursionRecord rec;
        rec.label = local_time;
        rec.entry_edge = static_cast<int>(rng.below(nbe));
        run_excursion(lattice, lattice.boundary_edges()[static_cast<std::size_t>(rec.entry_edge)].vertex, rec, cloud,
                      dirs, opt);
        cloud.excursions.push_back(std::move(rec));
        local_time += rng.exponential(rate);
    }
    return cloud;
}

VertexSet vacant_set(const ExcursionCloud& cloud, const LatticeDisk& lattice) {
    if (static_cast<int>(cloud.first_label.size()) != lattice.vertex_count())
        throw std::invalid_argument("vacant_set: lattice mismatch");
    return cloud.occupied().complement();
}

namespace {

void hitting_walk(const LatticeDisk& lattice, int start, const VertexSet* K, double exit_r2, DirectionStream& dirs,
                  std::vector<HittingRecord>& out) {
    const double n2 = static_cast<double>(lattice.n()) * lattice.n();
    HittingRecord rec;
    if (!K) rec.first_hit = start;
    const int exit = walk_to_boundary(lattice, start, dirs, [&](int v) {
        if (rec.first_hit < 0) {
            if (K->contains(v)) rec.first_hit = v;
        }
        if (rec.first_hit >= 0 && rec.ball_exit < 0) {
            const Site s = lattice.site(v);
            if ((static_cast<double>(s.i) * s.i + static_cast<double>(s.j) * s.j) >= exit_r2 * n2) rec.ball_exit = v;
        }
    });
    if (rec.first_hit >= 0) {
        rec.exit_edge = exit;
        out.push_back(rec);
    }
}

}  // namespace

std::vector<HittingRecord> hitting_records_direct(const LatticeDisk& lattice, double u, const VertexSet& K,
                                                  CounterRng& rng, double exit_radius) {
    check_u(u, "hitting_records_direct");
    const auto nbe = static_cast<std::uint64_t>(lattice.boundary_edge_count());
    const std::uint64_t N = rng.poisson(u * static_cast<double>(nbe));
    DirectionStream dirs(rng);
    std::vector<HittingRecord> out;
    for (std::uint64_t k = 0; k < N; ++k)
        hitting_walk(lattice, lattice.boundary_edges()[rng.below(nbe)].vertex, &K, exit_radius * exit_radius, dirs, out);
    return out;
}

std::vector<HittingRecord> hitting_records_local(const LatticeDisk& lattice, double u, const EquilibriumMeasure& eK,
                                                 CounterRng& rng, double exit_radius) {
    check_u(u, "hitting_records_local");
    if (eK.support.empty()) throw std::invalid_argument("hitting_records_local: K is empty");
    std::vector<double> w;
    w.reserve(eK.support.size());
    for (int x : eK.support) w.push_back(eK.weight[x]);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const std::uint64_t N = rng.poisson(u * eK.capacity);
    DirectionStream dirs(rng);
    std::vector<HittingRecord> out;
    for (std::uint64_t k = 0; k < N; ++k)
        hitting_walk(lattice, eK.support[pick(rng)], nullptr, exit_radius * exit_radius, dirs, out);
    return out;
}

std::vector<HittingRecord> hitting_records_single(const LatticeDisk& lattice, double u, const VertexSet& K,
                                                  CounterRng& rng, double exit_radius) {
    if (u < 0.0) throw std::invalid_argument("hitting_records_single: u must be >= 0");
    const auto nbe = static_cast<std::uint64_t>(lattice.boundary_edge_count());
    const double rate = static_cast<double>(nbe);
    DirectionStream dirs(rng);
    std::vector<HittingRecord> out;
    for (double t = rng.exponential(rate); t <= u; t += rng.exponential(rate))
        hitting_walk(lattice, lattice.boundary_edges()[rng.below(nbe)].vertex, &K, exit_radius * exit_radius, dirs, out);
    return out;
}

namespace {

// Point where the chord p->q leaves the unit disk (|p| < 1 <= |q|).
Point circle_exit(Point p, Point q) {
    const double dx = q.x - p.x, dy = q.y - p.y;
    const double a = dx * dx + dy * dy;
    const double b = 2.0 * (p.x * dx + p.y * dy);
    const double c = p.x * p.x + p.y * p.y - 1.0;
    const double t = (-b + std::sqrt(std::max(0.0, b * b - 4 * a * c))) / (2 * a);
    return {p.x + t * dx, p.y + t * dy};
}

void check_dt(double r, double dt) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("continuum sampler: need 0 < r < 1");
    if (!(dt > 0.0) || dt > (1.0 - r) * (1.0 - r) / 100.0)
        throw std::invalid_argument("continuum sampler: dt must satisfy 0 < dt <= (1-r)^2/100");
}

ContinuumPath brownian_to_circle(Point start, double dt, CounterRng& rng, const ContinuumOptions& opt) {
    ContinuumPath path;
    const double s = std::sqrt(dt);
    Point z = start;
    if (opt.store_paths) path.points.push_back(z);
    for (std::int64_t k = 0; k < opt.max_steps; ++k) {
        const Point q{z.x + s * rng.normal(), z.y + s * rng.normal()};
        if (q.x * q.x + q.y * q.y >= 1.0) {
            z = circle_exit(z, q);
            path.absorbed = true;
            if (opt.store_paths) path.points.push_back(z);
            break;
        }
        z = q;
        if (opt.store_paths) path.points.push_back(z);
    }
    if (!opt.store_paths) path.points = {start, z};
    return path;
}

}  // namespace

ContinuumPath conditioned_path(Point start, double r, double dt, CounterRng& rng, ContinuumOptions opt) {
    check_dt(r, dt);
    ContinuumPath path;
    const double s = std::sqrt(dt);
    const double cap = 1.0 / s;
    const double log_r = std::log(r);
    // start offset radially by sqrt(dt) to leave the singular drift at |z| = r
    const double rho0 = norm(start);
    Point z = rho0 > 0 ? Point{start.x * (rho0 + s) / rho0, start.y * (rho0 + s) / rho0} : Point{r + s, 0.0};
    if (opt.store_paths) path.points.push_back(z);
    for (std::int64_t k = 0; k < opt.max_steps; ++k) {
        const double rho2 = z.x * z.x + z.y * z.y;
        const double rho = std::sqrt(rho2);
        // grad log h with h(z) = log(|z|/r)/log(1/r)
        double scale = 1.0 / (rho2 * (std::log(rho) - log_r));
        double mag = scale * rho;
        if (mag > cap) scale *= cap / mag;
        Point q{z.x + scale * z.x * dt + s * rng.normal(), z.y + scale * z.y * dt + s * rng.normal()};
        const double qr = norm(q);
        if (qr >= 1.0) {
            z = circle_exit(z, q);
            path.absorbed = true;
            if (opt.store_paths) path.points.push_back(z);
            break;
        }
        if (qr <= r) {
            // discretization overshoot: reflect back through the circle |z| = r
            const double target = std::max(2.0 * r - qr, r + s);
            q = qr > 0 ? Point{q.x * target / qr, q.y * target / qr} : Point{target, 0.0};
        }
        z = q;
        if (opt.store_paths) path.points.push_back(z);
    }
    if (!opt.store_paths) path.points = {start, z};
    return path;
}

std::vector<ContinuumExcursion> sample_continuum_cloud_ball(double u, double r, double dt, CounterRng& rng,
                                                            ContinuumOptions opt) {
    check_u(u, "sample_continuum_cloud_ball");
    check_dt(r, dt);
    const std::uint64_t N = rng.poisson(u * continuum_cap_ball(r));
    std::vector<ContinuumExcursion> out(N);
    for (auto& e : out) {
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        e.start = {r * std::cos(theta), r * std::sin(theta)};
        e.forward = brownian_to_circle(e.start, dt, rng, opt);
        e.backward = conditioned_path(e.start, r, dt, rng, opt);
    }
    return out;
}

bool continuum_hits_ball(Point x, double r_target, double dt, CounterRng& rng) {
    const double s = std::sqrt(dt);
    const double rt2 = r_target * r_target;
    Point z = x;
    for (;;) {
        z = {z.x + s * rng.normal(), z.y + s * rng.normal()};
        const double q = z.x * z.x + z.y * z.y;
        if (q <= rt2) return true;
        if (q >= 1.0) return false;
    }
}

}  // namespace diskperc
