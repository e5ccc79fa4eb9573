#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "diskperc/acceptance.hpp"
#include "diskperc/excursions.hpp"
#include "diskperc/experiment.hpp"
#include "diskperc/gff.hpp"
#include "diskperc/loopsoup.hpp"
#include "diskperc/potential.hpp"
#include "diskperc/render.hpp"
#include "diskperc/sle.hpp"

using namespace diskperc;

namespace {

struct Command {
    CLI::App* app = nullptr;
    ExperimentConfig cfg;
    std::string out;
    std::string format = "csv";
    std::string render;
    bool timing = false;
    bool serial = false;
};

void param(Command& c, const std::string& flag, const std::string& key, const std::string& def,
           const std::string& help) {
    c.cfg.params[key] = def;
    c.app->add_option_function<std::string>(flag, [&c, key](const std::string& v) { c.cfg.params[key] = v; }, help)
        ->default_str(def);
}

Command& command(CLI::App& root, std::deque<Command>& cmds, const std::string& name, const std::string& experiment,
                 const std::string& help, const std::string& format = "csv") {
    Command& c = cmds.emplace_back();
    c.app = root.add_subcommand(name, help);
    c.app->set_help_flag("--help", "Print this help message and exit");  // gff takes --h
    c.cfg.experiment = experiment;
    c.format = format;
    c.app->add_option("--seed", c.cfg.seed, "RNG seed")->capture_default_str();
    c.app->add_option("--workers", c.cfg.workers, "worker threads (0 = OpenMP default)")->capture_default_str();
    c.app->add_option("-o,--out", c.out, "output file (default stdout)");
    c.app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    c.app->add_flag("--timing", c.timing, "add a wall-time column");
    c.app->add_flag("--serial", c.serial, "use the serial reference kernels");
    return c;
}

nlohmann::json json_number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

void emit(const Command& c, const std::vector<ResultRow>& rows) {
    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) throw std::runtime_error("cannot open " + c.out);
    }
    std::ostream& os = c.out.empty() ? std::cout : file;
    if (c.format == "csv") {
        write_csv(os, rows, c.timing);
        return;
    }
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"experiment", r.experiment}, {"parameters", r.parameters}, {"statistic", r.statistic},
                         {"value", json_number(r.value)}, {"stderr", json_number(r.stderr_value)}, {"seed", r.seed}};
        if (c.timing) j["wall_time_s"] = r.wall_time;
        arr.push_back(j);
    }
    os << nlohmann::json{{"schema", std::string(kResultSchema)}, {"rows", arr}}.dump(2) << "\n";
}

std::vector<ResultRow> execute(Command& c) {
    if (c.serial) c.cfg.params["mode"] = "serial";
    return run(c.cfg);
}

void render_excursions(const Command& c) {
    const auto& p = c.cfg;
    const LatticeDisk lat(static_cast<int>(p.integer("n", 32)));
    CounterRng rng(p.seed, 0);
    const double u = p.number("u", 1.0);
    const std::string sampler = p.text("sampler", "direct");
    ExcursionCloud cloud;
    if (sampler == "direct") cloud = sample_cloud_direct(lat, u, rng);
    else if (sampler == "single") cloud = sample_cloud_single_walk(lat, u, rng);
    else throw std::invalid_argument("--render supports the direct and single samplers");
    const VertexSet occ = cloud.occupied();
    write_png(render_disk(lat, {.occupied = &occ}), c.render);
}

void render_gff(const Command& c) {
    const auto& p = c.cfg;
    const LatticeDisk lat(static_cast<int>(p.integer("n", 48)));
    const DirichletSolver solver(lat);
    CounterRng rng(p.seed, 0);
    const Eigen::VectorXd phi = sample_dgff(solver, rng);
    write_png(render_disk(lat, {.field = &phi, .level = p.number("h", 0.5)}), c.render);
}

void render_sle(const Command& c) {
    const auto& p = c.cfg;
    const double kappa = p.number("kappa", 8.0 / 3.0);
    const double rho = rho_kappa_alpha(kappa, p.number("alpha", 0.2));
    const double T = p.number("T", 1.0);
    const double dt = std::max(p.number("dt", 1e-4), T / 20000.0);
    std::vector<std::vector<Point>> lines;
    double extent = 0.1;
    for (std::int64_t k = 0; k < p.integer("traces", 3); ++k) {
        CounterRng rng(p.seed, static_cast<std::uint64_t>(k));
        const auto trace = solve_trace(sample_driving(kappa, rho, T, dt, rng), 1);
        std::vector<Point> line;
        for (const auto& z : trace.points) {
            line.push_back({z.real(), z.imag()});
            extent = std::max({extent, std::abs(z.real()), z.imag()});
        }
        lines.push_back(std::move(line));
    }
    extent *= 1.05;
    write_text(svg_polylines(lines, {-extent, -0.05 * extent}, {extent, 1.95 * extent}, 800, false), c.render);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Excursion-set percolation in the lattice disk: experiments and acceptance suite"};
    app.require_subcommand(1);
    std::deque<Command> cmds;

    auto& info = command(app, cmds, "lattice-info", "lattice-info", "vertex and edge counts of D_n", "json");
    param(info, "--n", "n", "32", "mesh parameter");

    auto& pot = command(app, cmds, "potential", "potential", "capacity, Es statistic and Green function", "json");
    param(pot, "--n", "n", "32", "mesh parameter");
    param(pot, "--r", "r", "0.5", "ball radius");
    param(pot, "--op", "op", "cap", "cap | green | equilibrium | convergence");
    param(pot, "--ns", "ns", "16,32,64,128", "mesh parameters for --op convergence");
    param(pot, "--x1", "x1", "0", "first site, integer x (green)");
    param(pot, "--y1", "y1", "0", "first site, integer y (green)");
    param(pot, "--x2", "x2", "0", "second site, integer x (green)");
    param(pot, "--y2", "y2", "0", "second site, integer y (green)");

    auto& exc = command(app, cmds, "excursions", "excursions", "excursion cloud samplers");
    param(exc, "--n", "n", "32", "mesh parameter");
    param(exc, "--u", "u", "1", "intensity");
    param(exc, "--sampler", "sampler", "direct", "direct | local | single | continuum");
    param(exc, "--r", "r", "0.3", "ball radius for the local and continuum samplers");
    param(exc, "--reps", "reps", "1000", "replicas");
    exc.app->add_option("--render", exc.render, "write one sampled cloud as PNG");

    auto& loops = command(app, cmds, "loopsoup", "loopsoup", "random-walk loop soup");
    param(loops, "--n", "n", "32", "mesh parameter");
    param(loops, "--lambda", "lambda", "0.5", "loop intensity");
    param(loops, "--reps", "reps", "200", "replicas");
    param(loops, "--stats", "stats", "0", "1 to add loop-length and cluster-size histograms");

    auto& gff = command(app, cmds, "gff", "gff", "level-set crossing of the discrete GFF");
    param(gff, "--n", "n", "48", "mesh parameter");
    param(gff, "--h", "h", "0.5", "level");
    param(gff, "--event", "event", "disk-crossing", "disk-crossing | boundary");
    param(gff, "--r", "r", "0.3", "inner radius");
    param(gff, "--eps", "eps", "0.1", "outer gap");
    param(gff, "--cable", "cable", "0", "1 for cable-system connectivity");
    param(gff, "--reps", "reps", "1000", "replicas");
    gff.app->add_option("--render", gff.render, "write one field's level set as PNG");

    auto& cross = command(app, cmds, "crossing", "crossing", "one crossing probability");
    param(cross, "--model", "model", "vacant-excursion", "vacant-excursion | vacant-loops | gff-level | cable-gff-level");
    param(cross, "--target", "target", "outer-ball", "outer-ball | inner-boundary | boundary-layer");
    param(cross, "--n", "n", "32", "mesh parameter");
    param(cross, "--param", "param", "1", "u for vacant models, h for field models");
    param(cross, "--r", "r", "0.3", "inner radius");
    param(cross, "--eps", "eps", "0.1", "outer gap");
    param(cross, "--lambda", "lambda", "0.5", "loop intensity");
    param(cross, "--reps", "reps", "1000", "replicas");

    auto& sweep = command(app, cmds, "sweep", "sweep", "crossing probabilities over a parameter grid with logistic fits");
    param(sweep, "--model", "model", "vacant-excursion", "model");
    param(sweep, "--target", "target", "outer-ball", "target");
    param(sweep, "--params", "params", "0.4,0.7,1,1.3,1.6", "comma-separated parameter grid");
    param(sweep, "--ns", "ns", "32,64", "comma-separated mesh parameters");
    param(sweep, "--r", "r", "0.3", "inner radius");
    param(sweep, "--eps", "eps", "0.1", "outer gap");
    param(sweep, "--lambda", "lambda", "0.5", "loop intensity");
    param(sweep, "--reps", "reps", "400", "replicas per point");

    auto& sle = command(app, cmds, "sle", "sle", "SLE(kappa, rho) boundary statistics and restriction check");
    param(sle, "--kappa", "kappa", "2.6666666666666665", "kappa");
    param(sle, "--alpha", "alpha", "0.2", "restriction exponent");
    param(sle, "--alphas", "alphas", "0.2,0.3,0.45", "exponents for --stat hit");
    param(sle, "--dt", "dt", "0.0001", "time step");
    param(sle, "--T", "T", "50", "time horizon");
    param(sle, "--delta", "delta", "0.01", "approach threshold for --stat hit");
    param(sle, "--height", "height", "0.5", "vertical extent of A for --stat restriction");
    param(sle, "--x0", "x0", "1", "base point of A");
    param(sle, "--n", "n", "64", "lattice size for the restriction check");
    param(sle, "--stat", "stat", "hit", "hit | restriction");
    param(sle, "--reps", "reps", "1000", "replicas");
    param(sle, "--traces", "traces", "3", "number of traces for --render");
    sle.app->add_option("--render", sle.render, "write sampled traces as SVG");

    auto& coup = command(app, cmds, "coupling", "coupling", "random walk / Brownian motion couplings");
    param(coup, "--experiment", "kind", "kmt", "kmt | last-exit | capacity | beurling | excursion-match");
    param(coup, "--method", "method", "dyadic", "dyadic | skorokhod (1D kmt)");
    param(coup, "--horizons", "horizons", "64,256,1024,4096,16384", "1D horizons");
    param(coup, "--ns", "ns", "16,32,64", "mesh parameters");
    param(coup, "--n", "n", "64", "mesh parameter");
    param(coup, "--r", "r", "0.75", "radius");
    param(coup, "--u", "u", "1", "intensity (excursion-match)");
    param(coup, "--s", "s", "0.5,1,2,4,8", "last-exit thresholds in units of log(n)/n");
    param(coup, "--shape", "shape", "ball", "ball | segment | deep-segment (capacity)");
    param(coup, "--d", "d", "2,4,8,16", "Beurling start distances in lattice units");
    param(coup, "--R", "R", "0.5", "Beurling escape radius");
    param(coup, "--reps", "reps", "200", "replicas");

    auto& dom = command(app, cmds, "domination", "domination", "GFF vs vacant-set crossing under the isomorphism");
    param(dom, "--u", "u", "0.5", "intensity");
    param(dom, "--n", "n", "32", "mesh parameter");
    param(dom, "--r", "r", "0.3", "inner radius");
    param(dom, "--eps", "eps", "0.1", "outer gap");
    param(dom, "--reps", "reps", "500", "replicas");

    // Figure-style picture: excursion cloud (optionally with loops) and its interface.
    CLI::App* ren = app.add_subcommand("render", "render an excursion cloud to PNG");
    int rn = 128, size = 800;
    double ru = 1.0, rlambda = 0.0, arc_lo = -std::numbers::pi, arc_hi = 0.0;
    std::uint64_t rseed = 1;
    bool interface = false;
    std::string rout;
    ren->add_option("--n", rn, "mesh parameter")->capture_default_str();
    ren->add_option("--u", ru, "intensity")->capture_default_str();
    ren->add_option("--lambda", rlambda, "add a loop soup of this intensity")->capture_default_str();
    ren->add_option("--seed", rseed, "RNG seed")->capture_default_str();
    ren->add_option("--size", size, "image side in pixels")->capture_default_str();
    ren->add_flag("--interface", interface, "draw the interface seen from the arc complement in red");
    ren->add_option("--arc-lo", arc_lo, "arc start angle")->capture_default_str();
    ren->add_option("--arc-hi", arc_hi, "arc end angle")->capture_default_str();
    ren->add_option("-o,--out", rout, "PNG path")->required();

    CLI::App* val = app.add_subcommand("validate", "run the acceptance criteria");
    AcceptanceOptions vopt;
    int vworkers = 0;
    bool vserial = false;
    val->add_option("--seed", vopt.seed, "base seed")->capture_default_str();
    val->add_option("--scale", vopt.scale, "replica multiplier")->capture_default_str();
    val->add_option("--only", vopt.only, "criterion ids");
    val->add_option("--workers", vworkers, "worker threads")->capture_default_str();
    val->add_flag("--serial", vserial, "use the serial reference kernels");

    CLI::App* runc = app.add_subcommand("run", "run an experiment from a key = value config file");
    std::string config_path, run_out;
    bool run_timing = false;
    runc->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    runc->add_option("-o,--out", run_out, "output file (overrides the config)");
    runc->add_flag("--timing", run_timing, "add a wall-time column");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& c : cmds) {
            if (!c.app->parsed()) continue;
            emit(c, execute(c));
            if (!c.render.empty()) {
                if (c.cfg.experiment == "excursions") render_excursions(c);
                else if (c.cfg.experiment == "gff") render_gff(c);
                else if (c.cfg.experiment == "sle") render_sle(c);
            }
            return 0;
        }
        if (ren->parsed()) {
            const LatticeDisk lat(rn);
            CounterRng rng(rseed, 0);
            VertexSet occ = sample_cloud_direct(lat, ru, rng).occupied();
            if (rlambda > 0.0) {
                CounterRng soup_rng(rseed, 1);
                occ = combined_occupied(lat, occ, sample_loop_soup(LoopSoupPlan(lat), rlambda, soup_rng));
            }
            std::vector<int> iface;
            if (interface) iface = interface_vertices(lat, occ, arc_lo, arc_hi);
            RenderStyle style;
            style.size = size;
            write_png(render_disk(lat, {.occupied = &occ, .interface = interface ? &iface : nullptr}, style), rout);
            return 0;
        }
        if (val->parsed()) {
            set_worker_count(vworkers);
            if (vserial) vopt.mode = Execution::Serial;
            bool all = true;
            run_acceptance(vopt, [&](const CriterionResult& r) {
                all = all && r.pass;
                std::cout << format_result(r) << std::endl;
            });
            return all ? 0 : 1;
        }
        if (runc->parsed()) {
            Command c;
            c.cfg = ExperimentConfig::load(config_path);
            c.out = run_out.empty() ? c.cfg.output : run_out;
            c.timing = run_timing;
            emit(c, run(c.cfg));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
