#include "diskperc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "diskperc/coupling.hpp"
#include "diskperc/excursions.hpp"
#include "diskperc/gff.hpp"
#include "diskperc/lattice.hpp"
#include "diskperc/loopsoup.hpp"
#include "diskperc/parallel.hpp"
#include "diskperc/percolation.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/sle.hpp"
#include "diskperc/stats.hpp"

namespace diskperc {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

namespace {

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("parameter '" + key + "': not a number: '" + text + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, double value) { params[key] = format_number(value); }

void ExperimentConfig::set(const std::string& key, const std::vector<double>& values) {
    std::string s;
    for (std::size_t k = 0; k < values.size(); ++k) s += (k ? "," : "") + format_number(values[k]);
    params[key] = s;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : parse_double(key, it->second);
}

std::int64_t ExperimentConfig::integer(const std::string& key, std::int64_t fallback) const {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v) || std::abs(v) > 9e15)
        throw std::invalid_argument("parameter '" + key + "': expected an integer");
    return static_cast<std::int64_t>(v);
}

std::vector<double> ExperimentConfig::list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os << "experiment = " << experiment << "\n";
    os << "seed = " << seed << "\n";
    os << "workers = " << workers << "\n";
    if (!output.empty()) os << "output = " << output << "\n";
    for (const auto& [k, v] : params) os << k << " = " << v << "\n";
    return os.str();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig cfg;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        if (key == "experiment") cfg.experiment = value;
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "workers") cfg.workers = std::stoi(value);
        else if (key == "output") cfg.output = value;
        else cfg.params[key] = value;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool timing) {
    os << "# " << kResultSchema << "\n";
    os << "experiment,parameters,statistic,value,stderr,seed" << (timing ? ",wall_time_s" : "") << "\n";
    for (const auto& r : rows) {
        os << csv_field(r.experiment) << ',' << csv_field(r.parameters) << ',' << csv_field(r.statistic) << ','
           << format_number(r.value) << ',' << format_number(r.stderr_value) << ',' << r.seed;
        if (timing) os << ',' << format_number(r.wall_time);
        os << "\n";
    }
}

std::string to_csv(const std::vector<ResultRow>& rows, bool timing) {
    std::ostringstream os;
    write_csv(os, rows, timing);
    return os.str();
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> xs) {
    if (xs.empty()) return kNaN;
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    if (xs.size() % 2) return *mid;
    return 0.5 * (*mid + *std::max_element(xs.begin(), mid));
}

std::vector<int> as_ints(const std::vector<double>& xs) {
    std::vector<int> out;
    for (double x : xs) {
        if (x != std::floor(x)) throw std::invalid_argument("expected integer list entries");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

class Emitter {
public:
    Emitter(const ExperimentConfig& cfg) : cfg_(cfg), start_(std::chrono::steady_clock::now()) {}

    void add(const std::string& stat, double value, double se = kNaN,
             const std::vector<std::pair<std::string, std::string>>& extra = {}) {
        auto p = cfg_.params;
        for (const auto& [k, v] : extra) p[k] = v;
        std::string flat;
        for (const auto& [k, v] : p) flat += (flat.empty() ? "" : ";") + k + "=" + v;
        rows_.push_back({cfg_.experiment, flat, stat, value, se, cfg_.seed, 0.0});
    }

    std::vector<ResultRow> finish() {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        for (auto& r : rows_) r.wall_time = wall;
        return std::move(rows_);
    }

private:
    const ExperimentConfig& cfg_;
    std::chrono::steady_clock::time_point start_;
    std::vector<ResultRow> rows_;
};

Execution mode_of(const ExperimentConfig& c) {
    const std::string m = c.text("mode", "parallel");
    if (m == "parallel") return Execution::Parallel;
    if (m == "serial") return Execution::Serial;
    throw std::invalid_argument("mode must be 'serial' or 'parallel'");
}

int n_of(const ExperimentConfig& c, int fallback) {
    const auto n = c.integer("n", fallback);
    if (n < 1 || n > 100000) throw std::invalid_argument("n out of range");
    return static_cast<int>(n);
}

std::int64_t reps_of(const ExperimentConfig& c, std::int64_t fallback) {
    const auto r = c.integer("reps", fallback);
    if (r < 0) throw std::invalid_argument("reps must be >= 0");
    return r;
}

std::string tag(double x) { return format_number(x); }

void run_lattice_info(const ExperimentConfig& c, Emitter& e) {
    const LatticeDisk lat(n_of(c, 32));
    e.add("vertices", lat.vertex_count());
    e.add("interior_edges", lat.interior_edge_count());
    e.add("boundary_edges", lat.boundary_edge_count());
    e.add("outer_boundary_points", static_cast<double>(lat.outer_boundary().size()));
    e.add("inner_boundary_vertices", static_cast<double>(lat.inner_boundary().size()));
}

void run_potential(const ExperimentConfig& c, Emitter& e) {
    const std::string op = c.text("op", "cap");
    const double r = c.number("r", 0.5);
    if (op == "convergence") {
        for (const auto& row : capacity_convergence_ball(r, as_ints(c.list("ns", {16, 32, 64, 128})))) {
            const std::vector<std::pair<std::string, std::string>> ex{{"n", std::to_string(row.n)}};
            e.add("cap_discrete", row.cap_discrete, kNaN, ex);
            e.add("cap_continuum", row.cap_continuum, kNaN, ex);
            e.add("error", row.error, kNaN, ex);
        }
        return;
    }
    const LatticeDisk lat(n_of(c, 32));
    const DirichletSolver solver(lat);
    if (op == "green") {
        const Site a{static_cast<int>(c.integer("x1", 0)), static_cast<int>(c.integer("y1", 0))};
        const Site b{static_cast<int>(c.integer("x2", 0)), static_cast<int>(c.integer("y2", 0))};
        const auto va = lat.vertex_at(a), vb = lat.vertex_at(b);
        if (!va || !vb) throw std::invalid_argument("green: both sites must be vertices of D_n");
        e.add("green", solver.green(*va, *vb));
        const Point pa = lat.position(*va), pb = lat.position(*vb);
        e.add("green_continuum", continuum_green(pa, pb));
        return;
    }
    const VertexSet K = ball_vertices(lat, {0.0, 0.0}, r);
    if (op == "equilibrium") {
        const EquilibriumMeasure m = equilibrium_measure(solver, K);
        e.add("capacity", m.capacity);
        e.add("support_size", static_cast<double>(m.support.size()));
        e.add("max_weight", m.weight.maxCoeff());
        return;
    }
    if (op != "cap") throw std::invalid_argument("op must be cap, green, equilibrium or convergence");
    const double cap = capacity(solver, K);
    e.add("cap_discrete", cap);
    if (r > 0.0 && r < 1.0) {
        e.add("cap_continuum", continuum_cap_ball(r));
        e.add("cap_error", std::abs(cap - continuum_cap_ball(r)));
    }
    e.add("es_statistic", es_statistic(solver, K));
    if (const auto o = lat.vertex_at({0, 0})) e.add("green_origin", solver.green(*o, *o));
}

void run_capacity_curve(const ExperimentConfig& c, Emitter& e) {
    const std::string shape = c.text("shape", "ball");
    const auto ns = as_ints(c.list("ns", {32, 64, 128}));
    const double a = c.number("a", shape == "ball" ? 0.5 : 0.2);
    const double b = c.number("b", 0.8);
    for (const auto& row : capacity_convergence_general(shape, ns, a, b)) {
        const std::vector<std::pair<std::string, std::string>> ex{{"n", std::to_string(row.n)}};
        e.add("cap_discrete", row.cap_discrete, kNaN, ex);
        e.add("cap_reference", row.cap_reference, kNaN, ex);
        e.add(shape == "deep-segment" ? "cap_over_log_n" : "abs_error", row.error, kNaN, ex);
    }
}

void run_excursions(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 1000);
    if (reps == 0) return;
    const std::string sampler = c.text("sampler", "direct");
    const double u = c.number("u", 1.0);
    const double r = c.number("r", 0.3);
    const std::uint64_t seed = c.seed;
    if (sampler == "continuum") {
        const double dt = c.number("dt", (1 - r) * (1 - r) / 100.0);
        const auto counts = run_replicas<std::int64_t>(
            reps, seed,
            [&](std::int64_t, CounterRng& rng) {
                return static_cast<std::int64_t>(
                    sample_continuum_cloud_ball(u, r, dt, rng, {.store_paths = false}).size());
            },
            mode_of(c));
        std::vector<double> xs(counts.begin(), counts.end());
        const auto mv = stats::mean_var(xs);
        e.add("mean_count", mv.mean, mv.stderr_mean);
        e.add("expected_count", u * continuum_cap_ball(r));
        e.add("poisson_gof_p", stats::poisson_gof(counts, u * continuum_cap_ball(r)).p_value);
        return;
    }
    const LatticeDisk lat(n_of(c, 32));
    std::unique_ptr<DirichletSolver> solver;
    EquilibriumMeasure eK;
    double expected = u * lat.boundary_edge_count();
    if (sampler == "local") {
        solver = std::make_unique<DirichletSolver>(lat);
        eK = equilibrium_measure(*solver, ball_vertices(lat, {0.0, 0.0}, r));
        expected = u * eK.capacity;
    } else if (sampler != "direct" && sampler != "single") {
        throw std::invalid_argument("sampler must be direct, local, single or continuum");
    }
    struct Out {
        std::int64_t count = 0;
        double vacant = 0.0;
    };
    const auto res = run_replicas<Out>(
        reps, seed,
        [&](std::int64_t, CounterRng& rng) {
            ExcursionCloud cloud;
            if (sampler == "direct") cloud = sample_cloud_direct(lat, u, rng);
            else if (sampler == "single") cloud = sample_cloud_single_walk(lat, u, rng);
            else cloud = sample_hitting_K(lat, u, eK, rng);
            return Out{cloud.count(),
                       static_cast<double>(vacant_set(cloud, lat).count()) / lat.vertex_count()};
        },
        mode_of(c));
    std::vector<std::int64_t> counts;
    std::vector<double> xs, vac;
    for (const auto& o : res) {
        counts.push_back(o.count);
        xs.push_back(static_cast<double>(o.count));
        vac.push_back(o.vacant);
    }
    const auto mv = stats::mean_var(xs);
    const auto vv = stats::mean_var(vac);
    e.add("mean_count", mv.mean, mv.stderr_mean);
    e.add("expected_count", expected);
    e.add("poisson_gof_p", stats::poisson_gof(counts, expected).p_value);
    e.add("vacant_fraction", vv.mean, vv.stderr_mean);
}

void run_loopsoup(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 200);
    if (reps == 0) return;
    const LatticeDisk lat(n_of(c, 32));
    const double lambda = c.number("lambda", 0.5);
    const LoopSoupPlan plan(lat);
    double expected = 0.0;
    for (int v = 0; v < lat.vertex_count(); ++v) expected += lambda * -std::log1p(-plan.return_probability(v));
    struct Out {
        double loops = 0.0, largest = 0.0, covered = 0.0;
    };
    const auto res = run_replicas<Out>(
        reps, c.seed,
        [&](std::int64_t, CounterRng& rng) {
            const LoopSoupSample s = sample_loop_soup(plan, lambda, rng);
            const auto sizes = s.cluster_sizes();
            const auto covered = std::count_if(s.cluster.begin(), s.cluster.end(), [](int x) { return x >= 0; });
            return Out{static_cast<double>(s.loops.size()),
                       sizes.empty() ? 0.0 : static_cast<double>(*std::max_element(sizes.begin(), sizes.end())),
                       static_cast<double>(covered) / lat.vertex_count()};
        },
        mode_of(c));
    std::vector<double> a, b, d;
    for (const auto& o : res) {
        a.push_back(o.loops);
        b.push_back(o.largest);
        d.push_back(o.covered);
    }
    if (c.integer("stats", 0)) {
        std::map<int, std::int64_t> lengths, clusters;
        run_replicas<int>(
            reps, c.seed,
            [&](std::int64_t, CounterRng& rng) {
                const LoopSoupSample s = sample_loop_soup(plan, lambda, rng);
                for (const auto& l : s.loops) ++lengths[l.length()];
                for (int sz : s.cluster_sizes()) ++clusters[sz];
                return 0;
            },
            Execution::Serial);  // the histograms are shared
        for (const auto& [len, k] : lengths)
            e.add("loop_length_count", static_cast<double>(k), kNaN, {{"length", std::to_string(len)}});
        for (const auto& [sz, k] : clusters)
            e.add("cluster_size_count", static_cast<double>(k), kNaN, {{"size", std::to_string(sz)}});
    }
    const auto ma = stats::mean_var(a), mb = stats::mean_var(b), md = stats::mean_var(d);
    e.add("mean_loops", ma.mean, ma.stderr_mean);
    e.add("expected_loops", expected);
    e.add("mean_largest_cluster", mb.mean, mb.stderr_mean);
    e.add("covered_fraction", md.mean, md.stderr_mean);
}

CrossingSpec spec_of(const ExperimentConfig& c, Model fallback) {
    CrossingSpec s;
    s.model = c.has("model") ? parse_model(c.text("model", "")) : fallback;
    s.target = parse_target(c.text("target", "outer-ball"));
    s.r = c.number("r", 0.3);
    s.eps = c.number("eps", 0.1);
    s.lambda = c.number("lambda", 0.5);
    return s;
}

void add_estimate(Emitter& e, const Estimate& est, const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    e.add("p_hat", est.p_hat, est.stderr_p, extra);
}

void run_gff(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 1000);
    if (reps == 0) return;
    CrossingSpec s = spec_of(c, c.integer("cable", 0) ? Model::CableGffLevel : Model::GffLevel);
    const std::string event = c.text("event", "disk-crossing");
    if (event == "disk-crossing") s.target = Target::OuterBall;
    else if (event == "boundary") s.target = Target::InnerBoundary;
    else throw std::invalid_argument("event must be disk-crossing or boundary");
    add_estimate(e, crossing_probability(s, n_of(c, 48), c.number("h", 0.5), reps, c.seed, mode_of(c)));
}

void run_crossing(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 1000);
    if (reps == 0) return;
    const CrossingSpec s = spec_of(c, Model::VacantExcursion);
    add_estimate(e, crossing_probability(s, n_of(c, 32), c.number("param", 1.0), reps, c.seed, mode_of(c)));
}

void run_sweep(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 400);
    if (reps == 0) return;
    const CrossingSpec s = spec_of(c, Model::VacantExcursion);
    const auto params = c.list("params", {0.4, 0.7, 1.0, 1.3, 1.6});
    const auto ns = as_ints(c.list("ns", {32, 64}));
    const SweepResult res = threshold_sweep(s, params, ns, reps, c.seed, mode_of(c));
    for (const auto& p : res.points)
        add_estimate(e, p.estimate, {{"n", std::to_string(p.n)}, {"param", tag(p.param)}});
    for (const auto& f : res.fits) {
        const std::vector<std::pair<std::string, std::string>> ex{{"n", std::to_string(f.n)}};
        e.add("midpoint", f.fit.midpoint, f.fit.midpoint_stderr, ex);
        e.add("midpoint_ci_lo", f.fit.midpoint_ci.lo, kNaN, ex);
        e.add("midpoint_ci_hi", f.fit.midpoint_ci.hi, kNaN, ex);
        e.add("fit_converged", f.fit.converged ? 1.0 : 0.0, kNaN, ex);
    }
}

void run_sle(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 1000);
    const std::string stat = c.text("stat", "hit");
    if (stat == "hit") {
        if (reps == 0) return;
        const double kappa = c.number("kappa", 8.0 / 3.0);
        const auto alphas = c.list("alphas", {c.number("alpha", 0.2)});
        const auto h = boundary_hit_statistic(kappa, alphas, c.number("T", 1.0), c.number("dt", 1e-4),
                                              c.number("delta", 0.02), reps, c.seed,
                                              static_cast<int>(c.integer("grid", 2000)), mode_of(c));
        for (std::size_t k = 0; k < h.alphas.size(); ++k) {
            const std::vector<std::pair<std::string, std::string>> ex{{"alpha", tag(h.alphas[k])}};
            const double f = h.fraction[k];
            e.add("approach_fraction", f, std::sqrt(f * (1 - f) / static_cast<double>(reps)), ex);
            e.add("zero_hit_fraction", h.zero_hit_fraction[k], kNaN, ex);
            e.add("rho", rho_kappa_alpha(kappa, h.alphas[k]), kNaN, ex);
        }
        e.add("monotone_violations", static_cast<double>(h.monotone_violations));
    } else if (stat == "restriction") {
        const double alpha = c.number("alpha", 1.0), x0 = c.number("x0", 1.0), delta = c.number("height", 0.5);
        const int n = n_of(c, 64);
        e.add("p_exact", restriction_exact(alpha, x0, delta));
        e.add("p_discrete_exact", restriction_discrete_exact(alpha, x0, delta, n));
        if (reps == 0) return;
        const auto r = restriction_check(alpha, x0, delta, reps, c.seed, n, mode_of(c));
        e.add("p_hat", r.p_hat, r.stderr_p);
    } else {
        throw std::invalid_argument("stat must be hit or restriction");
    }
}

void run_coupling(const ExperimentConfig& c, Emitter& e) {
    const std::string kind = c.text("kind", "kmt");
    const std::int64_t reps = reps_of(c, 200);
    if (kind == "capacity") return run_capacity_curve(c, e);
    if (reps == 0) return;
    if (kind == "kmt") {
        const CouplingMethod method = c.text("method", "dyadic") == "skorokhod" ? CouplingMethod::Skorokhod
                                                                                : CouplingMethod::Dyadic;
        for (double hd : c.list("horizons", {64, 256, 1024, 4096, 16384})) {
            const auto h = static_cast<std::int64_t>(hd);
            const auto dev = run_replicas<double>(
                reps, c.seed ^ static_cast<std::uint64_t>(h),
                [&](std::int64_t, CounterRng& rng) { return coupling_1d(h, rng, method).deviation(); }, mode_of(c));
            e.add("median_deviation_1d", median(dev), kNaN, {{"horizon", std::to_string(h)}});
        }
        for (int n : as_ints(c.list("ns", {16, 32, 64}))) {
            const auto dev = run_replicas<double>(
                reps, c.seed + static_cast<std::uint64_t>(n),
                [&](std::int64_t, CounterRng& rng) { return kmt_2d(n, rng, {0, 0}, {0.0, 0.0}, false).sup_deviation; },
                mode_of(c));
            e.add("median_sup_deviation_2d", median(dev), kNaN, {{"n", std::to_string(n)}});
        }
    } else if (kind == "last-exit") {
        const auto s_values = c.list("s", {0.5, 1, 2, 4, 8});
        const auto rep = last_exit_gap(c.number("r", 0.75), n_of(c, 64), reps, c.seed, s_values, mode_of(c));
        for (std::size_t k = 0; k < s_values.size(); ++k)
            e.add("exceedance", rep.exceedance[k], kNaN, {{"s_value", tag(s_values[k])}});
        const auto ks = stats::ks_test(rep.angles, [](double a) { return (a + std::numbers::pi) / (2 * std::numbers::pi); });
        e.add("angle_uniform_ks_p", ks.p_value);
        e.add("median_gap", median(rep.gaps));
    } else if (kind == "beurling") {
        const auto ds = as_ints(c.list("d", {1, 2, 4, 8, 16}));
        const auto b = beurling_check(n_of(c, 128), c.number("R", 0.5), ds, reps, c.seed, c.number("length", 0.6),
                                      mode_of(c));
        for (std::size_t k = 0; k < ds.size(); ++k)
            e.add("escape_probability", b.escape[k], b.stderr_escape[k], {{"d", std::to_string(ds[k])}});
        e.add("exponent", b.exponent);
        e.add("fit_r2", b.r2);
    } else if (kind == "excursion-match") {
        const auto m = excursion_match(c.number("u", 1.0), c.number("r", 0.5), n_of(c, 64), reps, c.seed, mode_of(c));
        e.add("count_mismatch_rate", m.count_mismatch_rate);
        e.add("median_start_distance", median(m.start_distance));
        e.add("median_path_deviation", median(m.path_deviation));
        e.add("matched_excursions", static_cast<double>(m.path_deviation.size()));
    } else {
        throw std::invalid_argument("coupling kind must be kmt, last-exit, capacity, beurling or excursion-match");
    }
}

void run_domination(const ExperimentConfig& c, Emitter& e) {
    const std::int64_t reps = reps_of(c, 500);
    if (reps == 0) return;
    const auto d = isomorphism_domination(c.number("u", 0.5), n_of(c, 32), c.number("r", 0.3), c.number("eps", 0.1),
                                          reps, c.seed);
    const auto se = [&](double p) { return std::sqrt(p * (1 - p) / static_cast<double>(reps)); };
    e.add("p_gff", d.p_gff, se(d.p_gff));
    e.add("p_vacant", d.p_vacant, se(d.p_vacant));
    e.add("margin", d.margin, d.margin_stderr);
}

void run_bridge(const ExperimentConfig& c, Emitter& e) {
    const double a = c.number("a", 1.0), b = c.number("b", 1.0);
    e.add("p_exact", cable_open_probability(a, b));
    const std::int64_t reps = reps_of(c, 100000);
    if (reps == 0) return;
    const auto o = bridge_open_mc(a, b, static_cast<int>(c.integer("substeps", 64)), reps, c.seed);
    e.add("p_mc", o.p_open, o.stderr_p);
}

using Runner = std::function<void(const ExperimentConfig&, Emitter&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> r{
        {"lattice-info", run_lattice_info}, {"potential", run_potential},
        {"capacity", run_capacity_curve},   {"excursions", run_excursions},
        {"loopsoup", run_loopsoup},         {"gff", run_gff},
        {"crossing", run_crossing},         {"sweep", run_sweep},
        {"sle", run_sle},                   {"coupling", run_coupling},
        {"domination", run_domination},     {"bridge", run_bridge},
    };
    return r;
}

}  // namespace

std::vector<std::string> experiment_names() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
}

std::vector<ResultRow> run(const ExperimentConfig& config) {
    for (const auto& [name, fn] : registry()) {
        if (name != config.experiment) continue;
        set_worker_count(config.workers);
        Emitter e(config);
        fn(config, e);
        return e.finish();
    }
    throw std::invalid_argument("unknown experiment '" + config.experiment + "'");
}

}  // namespace diskperc
