#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "diskperc/experiment.hpp"

using namespace diskperc;

TEST_CASE("config text round-trip") {
    ExperimentConfig c;
    c.experiment = "crossing";
    c.seed = 123456789012345ULL;
    c.workers = 2;
    c.output = "out.csv";
    c.set("model", "vacant-excursion");
    c.set("param", 0.1);
    c.set("ns", std::vector<double>{16, 32, 64});
    const ExperimentConfig back = ExperimentConfig::parse(c.to_text());
    CHECK(back == c);
    CHECK(back.number("param", 0.0) == 0.1);
    CHECK(back.list("ns", {}) == std::vector<double>{16, 32, 64});
    CHECK(back.integer("missing", 7) == 7);
    CHECK(back.text("missing", "x") == "x");

    const auto parsed = ExperimentConfig::parse("# comment\nexperiment = gff\n  h = 0.25  # trailing\n\nseed=9\n");
    CHECK(parsed.experiment == "gff");
    CHECK(parsed.seed == 9);
    CHECK(parsed.number("h", 0) == 0.25);
    CHECK_THROWS_AS(ExperimentConfig::parse("no equals sign\n"), std::invalid_argument);
}

TEST_CASE("CSV schema and quoting") {
    ResultRow r{"x", "a=1;b=two", "p", 0.5, 0.01, 3, 1.25};
    const std::string csv = to_csv({r});
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# diskperc-results v1");
    std::getline(in, line);
    CHECK(line == "experiment,parameters,statistic,value,stderr,seed");
    std::getline(in, line);
    CHECK(line == "x,a=1;b=two,p,0.5,0.01,3");
    CHECK(to_csv({r}, true).find("wall_time_s") != std::string::npos);

    r.statistic = "has,comma";
    CHECK(to_csv({r}).find("\"has,comma\"") != std::string::npos);
    CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("experiment registry") {
    const auto names = experiment_names();
    for (const char* want : {"lattice-info", "potential", "excursions", "loopsoup", "gff", "crossing", "sweep", "sle",
                             "coupling"})
        CHECK(std::find(names.begin(), names.end(), want) != names.end());

    ExperimentConfig c;
    c.experiment = "percolate-everything";
    CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("zero replicas produce no rows") {
    for (const char* name : {"crossing", "gff", "excursions", "sle"}) {
        ExperimentConfig c;
        c.experiment = name;
        c.set("reps", "0");
        CHECK(run(c).empty());
    }
}

TEST_CASE("output does not depend on the worker count") {
    ExperimentConfig c;
    c.experiment = "crossing";
    c.seed = 77;
    c.set("n", "16");
    c.set("reps", "40");
    c.set("param", "0.5");
    c.workers = 1;
    const std::string one = to_csv(run(c));
    c.workers = 2;
    CHECK(to_csv(run(c)) == one);
    c.set("mode", "serial");
    const auto serial = run(c);
    c.workers = 1;
    c.params.erase("mode");
    const auto parallel = run(c);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
        CHECK(serial[k].value == parallel[k].value);
        CHECK(serial[k].stderr_value == parallel[k].stderr_value);
    }
    c.seed = 78;
    c.set("param", "1.0");
    CHECK(to_csv(run(c)) != one);
}

TEST_CASE("lattice-info small case") {
    ExperimentConfig c;
    c.experiment = "lattice-info";
    c.set("n", "2");
    const auto rows = run(c);
    const auto it = std::find_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.statistic == "vertices"; });
    REQUIRE(it != rows.end());
    CHECK(it->value == 9);
}
