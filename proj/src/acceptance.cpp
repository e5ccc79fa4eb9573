#include "diskperc/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "diskperc/coupling.hpp"
#include "diskperc/excursions.hpp"
#include "diskperc/experiment.hpp"
#include "diskperc/gff.hpp"
#include "diskperc/lattice.hpp"
#include "diskperc/loopsoup.hpp"
#include "diskperc/percolation.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/sle.hpp"
#include "diskperc/stats.hpp"

namespace diskperc {

namespace {

using std::numbers::pi;

std::string short_number(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// Collects the reported numbers twice: rounded for people, exact for the digest.
class Report {
public:
    void num(const std::string& key, double v, int precision = 5) {
        std::ostringstream os;
        os << std::setprecision(precision) << v + 0.0;  // no "-0"
        sep(summary_) << key << '=' << os.str();
        digest_ += key + '=' + format_number(v) + ';';
    }
    void text(const std::string& s) {
        sep(summary_) << s;
        digest_ += s + ';';
    }
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            text("FAILED(" + what + ")");
        }
    }
    bool pass() const { return pass_; }
    std::string summary() const { return summary_.str(); }
    const std::string& digest() const { return digest_; }

private:
    std::ostringstream& sep(std::ostringstream& os) {
        if (os.tellp() > 0) os << ", ";
        return os;
    }
    std::ostringstream summary_;
    std::string digest_;
    bool pass_ = true;
};

std::int64_t scaled(const AcceptanceOptions& o, std::int64_t reps, std::int64_t floor = 50) {
    return std::max<std::int64_t>(floor, static_cast<std::int64_t>(std::llround(static_cast<double>(reps) * o.scale)));
}

std::uint64_t seed_for(const AcceptanceOptions& o, int id) { return mix64(o.seed + static_cast<std::uint64_t>(id)); }

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

// ---------------------------------------------------------------------------

void exact_continuum(Report& r) {
    const double tol = 1e-12;
    auto close = [&](const std::string& key, double got, double want) {
        r.num(key, got, 10);
        r.check(std::abs(got - want) <= tol, key);
    };
    close("cap_B(1/2)", continuum_cap_ball(0.5), 2 * pi / std::log(2.0));
    close("G(0,1/2)", continuum_green({0, 0}, {0.5, 0}), std::log(2.0) / (2 * pi));
    close("annulus_hit", continuum_annulus_hit(0.5, 0.25, 1.0), 0.5);
    close("p(1,1)", p_line(1.0, 1.0), 1 - std::exp(-2.0));
    close("rho_8/3(1/3)", rho_kappa_alpha(8.0 / 3.0, 1.0 / 3.0), -2.0 / 3.0);
    close("rho_4(1/4)", rho_kappa_alpha(4.0, 0.25), 0.0);
    close("lambda(4)", lambda_kappa(4.0), 0.5);
    close("lambda(8/3)", lambda_kappa(8.0 / 3.0), 0.0);
}

void exact_discrete(Report& r, std::uint64_t seed) {
    const double tol = 1e-9;
    {
        const LatticeDisk lat(2);
        const DirichletSolver s(lat);
        const double cap = capacity(s, ball_vertices(lat, {0, 0}, 0.0));
        r.num("cap2({0})", cap, 10);
        r.check(std::abs(cap - 8.0 / 3.0) <= tol, "cap2");
    }
    {
        const LatticeDisk lat(1);
        const DirichletSolver s(lat);
        const double g = s.green(0, 0);
        r.num("G1(0,0)", g, 10);
        r.check(std::abs(g - 0.25) <= tol, "G1");
    }
    const LatticeDisk lat(16);
    const DirichletSolver s(lat);
    CounterRng rng(seed, 0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        VertexSet K = lat.none();
        const double density = 0.02 + 0.3 * rng.uniform();
        for (int v = 0; v < lat.vertex_count(); ++v)
            if (rng.uniform() < density) K.insert(v);
        if (K.empty()) K.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(lat.vertex_count()))));
        const EquilibriumMeasure e = equilibrium_measure(s, K);
        const Eigen::VectorXd h = s.solve(e.weight);
        for (int v : K.indices()) worst = std::max(worst, std::abs(h[v] - 1.0));
    }
    r.num("last_exit_max_dev", worst, 3);
    r.check(worst <= tol, "last-exit identity");
}

void capacity_convergence(Report& r) {
    const auto rows = capacity_convergence_ball(0.5, {32, 64, 128});
    for (const auto& row : rows) r.num("err_n" + std::to_string(row.n), row.error);
    const double q1 = rows[0].error / rows[1].error, q2 = rows[1].error / rows[2].error;
    r.num("ratio_32/64", q1, 4);
    r.num("ratio_64/128", q2, 4);
    r.check(q1 >= 1.8 && q2 >= 1.8, "ratio >= 1.8");
}

void poisson_laws(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const std::int64_t reps = scaled(o, 10000, 200);
    const LatticeDisk lat(16);
    const DirichletSolver solver(lat);
    const double u = 0.05;
    const EquilibriumMeasure eK = equilibrium_measure(solver, ball_vertices(lat, {0, 0}, 0.3));
    const double u_local = 1.0;
    std::uint64_t stream = 0;
    auto test = [&](const std::string& name, double mean, auto&& draw) {
        const auto counts = run_replicas<std::int64_t>(reps, seed + ++stream, draw, o.mode);
        const auto t = stats::poisson_gof(counts, mean);
        r.num(name + "_p", t.p_value, 4);
        r.check(t.p_value > 0.01, name);
    };
    const double nbe = lat.boundary_edge_count();
    test("direct", u * nbe,
         [&](std::int64_t, CounterRng& g) { return sample_cloud_direct(lat, u, g).count(); });
    test("local", u_local * eK.capacity,
         [&](std::int64_t, CounterRng& g) { return sample_hitting_K(lat, u_local, eK, g).count(); });
    test("single", u * nbe,
         [&](std::int64_t, CounterRng& g) { return sample_cloud_single_walk(lat, u, g).count(); });
    const double rc = 0.25, uc = 0.5;
    test("continuum", uc * continuum_cap_ball(rc), [&](std::int64_t, CounterRng& g) {
        return static_cast<std::int64_t>(
            sample_continuum_cloud_ball(uc, rc, (1 - rc) * (1 - rc) / 100.0, g, {.store_paths = false}).size());
    });
}

void sampler_equivalence(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const std::int64_t reps = scaled(o, 200000, 2000);
    const LatticeDisk lat(32);
    const DirichletSolver solver(lat);
    const VertexSet K = ball_vertices(lat, {0, 0}, 0.3);
    const EquilibriumMeasure eK = equilibrium_measure(solver, K);
    const double u = 0.5;
    const auto direct = run_replicas<std::vector<HittingRecord>>(
        reps, seed, [&](std::int64_t, CounterRng& g) { return hitting_records_direct(lat, u, K, g); }, o.mode);
    const auto local = run_replicas<std::vector<HittingRecord>>(
        reps, seed + 1, [&](std::int64_t, CounterRng& g) { return hitting_records_local(lat, u, eK, g); }, o.mode);
    const int N = lat.vertex_count();
    std::vector<double> ha(static_cast<std::size_t>(N)), hb(static_cast<std::size_t>(N));
    std::vector<double> ca(64), cb(64);
    std::vector<double> ea(16), eb(16);
    // first exit of B(0.4) after the first hit, binned by angle
    auto exit_sector = [&](int v) {
        const Site s = lat.site(v);
        const double th = std::atan2(static_cast<double>(s.j), static_cast<double>(s.i)) + pi;
        return std::min(15, static_cast<int>(th / (2 * pi) * 16));
    };
    auto tally = [&](const auto& recs, auto& h, auto& c, auto& e) {
        for (const auto& rep : recs) {
            c[std::min<std::size_t>(63, rep.size())] += 1;
            for (const auto& x : rep) {
                h[static_cast<std::size_t>(x.first_hit)] += 1;
                e[static_cast<std::size_t>(exit_sector(x.ball_exit))] += 1;
            }
        }
    };
    tally(direct, ha, ca, ea);
    tally(local, hb, cb, eb);
    const auto t_hit = stats::two_sample_chi_square(ha, hb);
    const auto t_cnt = stats::two_sample_chi_square(ca, cb);
    const auto t_exit = stats::two_sample_chi_square(ea, eb);
    r.num("first_hit_p", t_hit.p_value, 4);
    r.num("count_p", t_cnt.p_value, 4);
    r.num("exit_sector_p", t_exit.p_value, 4);
    r.check(t_hit.p_value > 0.01, "first hit");
    r.check(t_cnt.p_value > 0.01, "count");
    r.check(t_exit.p_value > 0.01, "exit");
}

VertexSet random_connected_superset(const LatticeDisk& lat, VertexSet K, int extra, CounterRng& rng) {
    for (int added = 0; added < extra;) {
        std::vector<int> frontier;
        for (int v : K.indices())
            for (NeighbourCode w : lat.neighbours(v))
                if (!is_boundary_code(w) && !K.contains(w)) frontier.push_back(w);
        if (frontier.empty()) break;
        K.insert(frontier[static_cast<std::size_t>(rng.below(frontier.size()))]);
        ++added;
    }
    return K;
}

void exploration_identity(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    {
        const LatticeDisk lat(32);
        const DirichletSolver solver(lat);
        CounterRng rng(seed, 0);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const VertexSet K = random_connected_superset(lat, ball_vertices(lat, {0, 0}, 0.3),
                                                          static_cast<int>(rng.below(400)), rng);
            const EquilibriumMeasure e = equilibrium_measure(solver, K);
            worst = std::max(worst, std::abs(martingale_variance(solver, e) - e.capacity) / e.capacity);
        }
        r.num("algebraic_rel_dev", worst, 3);
        r.check(worst <= 1e-8, "Var = cap");
    }
    const LatticeDisk lat(16);
    const DirichletSolver solver(lat);
    const EquilibriumMeasure e = equilibrium_measure(solver, ball_vertices(lat, {0, 0}, 0.3));
    const std::int64_t reps = scaled(o, 10000, 200);
    const auto m = run_replicas<double>(
        reps, seed + 1, [&](std::int64_t, CounterRng& g) { return exploration_martingale(e, sample_dgff(solver, g)); },
        o.mode);
    const auto mv = stats::mean_var(m);
    const double sigma = e.capacity * std::sqrt(2.0 / static_cast<double>(reps - 1));
    r.num("cap", e.capacity);
    r.num("mc_var", mv.variance);
    r.num("z", (mv.variance - e.capacity) / sigma, 3);
    r.check(std::abs(mv.variance - e.capacity) <= 3 * sigma, "MC variance");
}

void vacant_threshold(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    CrossingSpec spec;  // vacant excursion set, B_n(0.3) to the outer ball, eps 0.1
    const std::int64_t reps = scaled(o, 2000, 100);
    const auto ev = crossing_events(spec, 64, {0.7, 1.4}, reps, seed, o.mode);
    std::int64_t a = 0, b = 0;
    for (const auto& e : ev) {
        a += e[0];
        b += e[1];
    }
    const Estimate ea = make_estimate(a, reps, seed), eb = make_estimate(b, reps, seed);
    const double sep = (ea.p_hat - eb.p_hat) / std::hypot(ea.stderr_p, eb.stderr_p);
    r.num("p(0.7)", ea.p_hat, 4);
    r.num("p(1.4)", eb.p_hat, 4);
    r.num("sigmas", sep, 3);
    r.check(ea.p_hat - eb.p_hat > 0.2 && sep >= 5.0, "gap");

    // Midpoint trend, reported only.
    const std::vector<double> grid{0.5, 0.7, 0.9, 1.1, 1.3, 1.5};
    const auto sw = threshold_sweep(spec, grid, {32, 64, 128}, scaled(o, 300, 50), seed + 1, o.mode);
    for (const auto& f : sw.fits) {
        const std::string tag = "n" + std::to_string(f.n);
        r.num("mid_" + tag, f.fit.midpoint, 4);
        r.num("ci_" + tag + "_lo", f.fit.midpoint_ci.lo, 4);
        r.num("ci_" + tag + "_hi", f.fit.midpoint_ci.hi, 4);
        r.text("pi/3_in_band_" + tag + "=" +
               ((f.fit.midpoint_ci.lo <= pi / 3 && pi / 3 <= f.fit.midpoint_ci.hi) ? "yes" : "no"));
    }
}

void gff_threshold(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    CrossingSpec spec;
    spec.model = Model::GffLevel;
    const std::vector<double> hs{-0.4, 0.0, 0.2, 0.4, 0.8, 1.2, 1.6};
    const std::int64_t reps = scaled(o, 2000, 100);
    const auto sw = threshold_sweep(spec, hs, {48}, reps, seed, o.mode);
    double p02 = 0, p16 = 0;
    for (const auto& p : sw.points) {
        if (p.param == 0.2) p02 = p.estimate.p_hat;
        if (p.param == 1.6) p16 = p.estimate.p_hat;
    }
    const double mid = sw.fits[0].fit.midpoint;
    r.num("p(0.2)", p02, 4);
    r.num("p(1.6)", p16, 4);
    r.num("midpoint", mid, 4);
    r.check(p02 >= 0.1, "p(0.2) >= 0.1");
    r.check(p16 <= p02 / 2, "p(1.6) <= p(0.2)/2");
    r.check(mid > 0.0 && mid <= 1.26, "midpoint in (0, 1.26]");
}

void domination(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const std::int64_t reps = scaled(o, 1000, 100);
    for (double u : {0.3, 0.5, 0.8}) {
        const auto d = isomorphism_domination(u, 32, 0.3, 0.1, reps, seed + static_cast<std::uint64_t>(u * 10));
        const std::string tag = "u" + short_number(u);
        r.num("p_gff_" + tag, d.p_gff, 4);
        r.num("p_vac_" + tag, d.p_vacant, 4);
        r.check(d.margin <= 2 * d.margin_stderr, "domination at " + tag);
    }
}

void restriction(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const std::int64_t reps = scaled(o, 10000, 200);
    for (double alpha : {1.0 / 3.0, 1.0}) {
        const auto res = restriction_check(alpha, 1.0, 0.5, reps, seed + (alpha == 1.0), 256, o.mode);
        const std::string tag = alpha == 1.0 ? "a1" : "a1/3";
        r.num("p_" + tag, res.p_hat, 4);
        r.num("exact_" + tag, res.p_exact, 6);
        r.num("z_" + tag, (res.p_hat - res.p_exact) / res.stderr_p, 3);
        r.check(std::abs(res.p_hat - res.p_exact) <= 3 * res.stderr_p, tag);
    }
}

void sle_dichotomy(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const auto h = boundary_hit_statistic(8.0 / 3.0, {0.2, 0.3, 0.45}, 50.0, 1e-4, 0.01, scaled(o, 2000, 100), seed,
                                          2000, o.mode);
    r.num("f(0.20)", h.fraction[0], 4);
    r.num("f(0.30)", h.fraction[1], 4);
    r.num("f(0.45)", h.fraction[2], 4);
    r.num("violations", static_cast<double>(h.monotone_violations));
    r.check(h.fraction[0] - h.fraction[2] >= 0.4, "gap >= 0.4");
    r.check(h.monotone_violations == 0, "monotone");
}

void loop_soup(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const LatticeDisk lat(2);
    const double lambda = 0.5;
    const int L = 12;
    const std::int64_t reps = scaled(o, 10000, 200);
    const LoopSoupPlan plan(lat);
    std::vector<double> cnt_a(32), cnt_b(32), len_a(L + 1), len_b(L + 1);
    const auto peel = run_replicas<LoopSoupSample>(
        reps, seed, [&](std::int64_t, CounterRng& g) { return sample_loop_soup(plan, lambda, g); }, o.mode);
    const auto orc = run_replicas<LoopSoupSample>(
        reps, seed + 1, [&](std::int64_t, CounterRng& g) { return loop_rejection_oracle(lat, lambda, L, g).sample; },
        o.mode);
    auto tally = [&](const std::vector<LoopSoupSample>& xs, std::vector<double>& c, std::vector<double>& h) {
        for (const auto& s : xs) {
            std::size_t k = 0;
            for (const auto& loop : s.loops)
                if (loop.length() <= L) {
                    ++k;
                    h[static_cast<std::size_t>(loop.length())] += 1;
                }
            c[std::min<std::size_t>(31, k)] += 1;
        }
    };
    tally(peel, cnt_a, len_a);
    tally(orc, cnt_b, len_b);
    const auto tc = stats::two_sample_chi_square(cnt_a, cnt_b);
    const auto tl = stats::two_sample_chi_square(len_a, len_b);
    r.num("count_p", tc.p_value, 4);
    r.num("length_p", tl.p_value, 4);
    r.check(tc.p_value > 0.01, "counts");
    r.check(tl.p_value > 0.01, "lengths");

    CrossingSpec ex, lp;
    lp.model = Model::VacantLoops;
    lp.lambda = lambda_kappa(8.0 / 3.0);
    const std::int64_t creps = scaled(o, 200, 20);
    const auto a = crossing_events(ex, 32, {0.6, 1.0, 1.4}, creps, seed + 2, o.mode);
    const auto b = crossing_events(lp, 32, {0.6, 1.0, 1.4}, creps, seed + 2, o.mode);
    const bool same = a == b;
    r.text(std::string("lambda(8/3)_pipeline_identical=") + (same ? "yes" : "no"));
    r.check(same, "bit-identical");
}

void coupling_scaling(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const std::int64_t reps = scaled(o, 400, 40);
    std::vector<double> lh, med;
    for (std::int64_t h = 64; h <= 65536; h *= 4) {
        const auto dev = run_replicas<double>(
            reps, seed + static_cast<std::uint64_t>(h),
            [&](std::int64_t, CounterRng& g) { return dyadic_coupling_1d(h, g).deviation(); }, o.mode);
        lh.push_back(std::log(static_cast<double>(h)));
        med.push_back(median(dev));
    }
    const auto fit = stats::linear_fit(lh, med);
    r.num("1d_slope", fit.slope, 4);
    r.num("1d_r2", fit.r2, 4);
    r.check(fit.r2 >= 0.9, "1D R^2");

    std::vector<double> m2;
    for (int n : {16, 32, 64}) {
        const auto dev = run_replicas<double>(
            reps, seed + 7 * static_cast<std::uint64_t>(n),
            [&](std::int64_t, CounterRng& g) { return kmt_2d(n, g, {0, 0}, {0.0, 0.0}, false).sup_deviation; }, o.mode);
        m2.push_back(median(dev));
    }
    const double q1 = m2[1] / m2[0], q2 = m2[2] / m2[1];
    r.num("2d_ratio_32/16", q1, 4);
    r.num("2d_ratio_64/32", q2, 4);
    r.check(q1 >= 0.4 && q1 <= 0.9 && q2 >= 0.4 && q2 <= 0.9, "2D ratios");

    const auto b = beurling_check(256, 0.5, {2, 4, 8, 16}, scaled(o, 4000, 200), seed + 3, 0.6, o.mode);
    r.num("beurling_exponent", b.exponent, 4);
    r.check(b.exponent >= 0.4 && b.exponent <= 0.6, "Beurling exponent");
}

void bridge_minimum(Report& r, const AcceptanceOptions& o, std::uint64_t seed) {
    const double exact = cable_open_probability(1.0, 1.0);
    const auto mc = bridge_open_mc(1.0, 1.0, 64, scaled(o, 200000, 10000), seed);
    r.num("exact", exact, 8);
    r.num("mc", mc.p_open, 6);
    r.num("z", (mc.p_open - exact) / mc.stderr_p, 3);
    r.check(std::abs(exact - (1 - std::exp(-4.0))) <= 1e-12, "closed form");
    r.check(std::abs(mc.p_open - exact) <= 3 * mc.stderr_p, "MC within 3 sigma");
}

void determinism(Report& r, const AcceptanceOptions& o) {
    // Every stochastic criterion at reduced size, under three schedules.
    AcceptanceOptions small = o;
    small.scale = std::min(o.scale, 0.02);
    const int saved = worker_count();
    int mismatches = 0;
    for (int id = 1; id < kCriterionCount; ++id) {
        std::vector<std::string> digests;
        for (int variant = 0; variant < 3; ++variant) {
            AcceptanceOptions v = small;
            v.mode = variant == 2 ? Execution::Serial : Execution::Parallel;
            set_worker_count(variant == 0 ? 1 : 2);
            digests.push_back(run_criterion(id, v).digest);
        }
        if (digests[0] != digests[1] || digests[0] != digests[2]) {
            ++mismatches;
            r.text("differs:" + std::to_string(id));
        }
    }
    set_worker_count(saved);
    r.num("criteria_compared", kCriterionCount - 1);
    r.num("mismatches", mismatches);
    r.check(mismatches == 0, "byte-identical reruns");
}

const char* kNames[kCriterionCount] = {
    "exact continuum formulas",  "exact discrete oracle",     "capacity convergence",
    "poisson count laws",        "sampler equivalence",       "exploration martingale identity",
    "vacant-set threshold trend", "dGFF level-set trend",     "isomorphism domination",
    "restriction formula",       "SLE dichotomy",             "loop-soup validation",
    "coupling scaling",          "bridge-minimum formula",    "determinism",
};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& o) {
    if (id < 1 || id > kCriterionCount) throw std::invalid_argument("criterion id must be in 1..15");
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    const std::uint64_t seed = seed_for(o, id);
    switch (id) {
        case 1: exact_continuum(rep); break;
        case 2: exact_discrete(rep, seed); break;
        case 3: capacity_convergence(rep); break;
        case 4: poisson_laws(rep, o, seed); break;
        case 5: sampler_equivalence(rep, o, seed); break;
        case 6: exploration_identity(rep, o, seed); break;
        case 7: vacant_threshold(rep, o, seed); break;
        case 8: gff_threshold(rep, o, seed); break;
        case 9: domination(rep, o, seed); break;
        case 10: restriction(rep, o, seed); break;
        case 11: sle_dichotomy(rep, o, seed); break;
        case 12: loop_soup(rep, o, seed); break;
        case 13: coupling_scaling(rep, o, seed); break;
        case 14: bridge_minimum(rep, o, seed); break;
        case 15: determinism(rep, o); break;
    }
    CriterionResult res;
    res.id = id;
    res.name = kNames[id - 1];
    res.pass = rep.pass();
    res.summary = rep.summary();
    res.digest = rep.digest();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
            continue;
        out.push_back(run_criterion(id, options));
        if (on_result) on_result(out.back());
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << r.id << "] " << r.name << ": " << r.summary << " ("
       << std::fixed << std::setprecision(1) << r.seconds << " s)";
    return os.str();
}

}  // namespace diskperc
