// Serial reference vs OpenMP replica kernels: wall time and output equality.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "diskperc/coupling.hpp"
#include "diskperc/gff.hpp"
#include "diskperc/parallel.hpp"
#include "diskperc/percolation.hpp"
#include "diskperc/sle.hpp"

using namespace diskperc;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Kernel {
    std::string name;
    std::function<std::vector<double>(Execution)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const double scale = argc > 1 ? std::stod(argv[1]) : 1.0;
    const auto reps = [&](std::int64_t r) { return std::max<std::int64_t>(10, static_cast<std::int64_t>(r * scale)); };

    const std::vector<Kernel> kernels{
        {"vacant crossing n=64",
         [&](Execution m) {
             std::vector<double> out;
             for (const auto& e : crossing_events(CrossingSpec{}, 64, {0.7, 1.4}, reps(200), 1, m))
                 out.insert(out.end(), e.begin(), e.end());
             return out;
         }},
        {"gff crossing n=48",
         [&](Execution m) {
             CrossingSpec s;
             s.model = Model::GffLevel;
             return std::vector<double>{crossing_probability(s, 48, 0.4, reps(200), 2, m).p_hat};
         }},
        {"sle hit statistic",
         [&](Execution m) {
             return boundary_hit_statistic(8.0 / 3.0, {0.2, 0.45}, 50.0, 1e-4, 0.01, reps(400), 3, 2000, m).fraction;
         }},
        {"2d coupling n=32",
         [&](Execution m) {
             return run_replicas<double>(
                 reps(200), 4,
                 [](std::int64_t, CounterRng& g) { return kmt_2d(32, g, {0, 0}, {0.0, 0.0}, false).sup_deviation; }, m);
         }},
        {"restriction n=64",
         [&](Execution m) {
             const auto r = restriction_check(1.0, 1.0, 0.5, reps(1000), 5, 64, m);
             return std::vector<double>{r.p_hat};
         }},
    };

    std::printf("workers: %d\n", worker_count());
    std::printf("%-24s %12s %12s %9s %s\n", "kernel", "serial_s", "parallel_s", "speedup", "identical");
    for (const auto& k : kernels) {
        std::vector<double> a, b;
        const double ts = seconds([&] { a = k.run(Execution::Serial); });
        const double tp = seconds([&] { b = k.run(Execution::Parallel); });
        std::printf("%-24s %12.3f %12.3f %9.2f %s\n", k.name.c_str(), ts, tp, ts / tp, a == b ? "yes" : "NO");
    }
}
