#include <cstdlib>
#include <iostream>
#include <string>

#include "diskperc/acceptance.hpp"

int main(int argc, char** argv) {
    diskperc::AcceptanceOptions opt;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a.empty() || a.find_first_not_of("0123456789") != std::string::npos) {
            std::cerr << "usage: acceptance_tests [criterion ids...]\n";
            return a == "-h" || a == "--help" ? EXIT_SUCCESS : EXIT_FAILURE;
        }
        opt.only.push_back(std::stoi(a));
    }
    int failed = 0;
    diskperc::run_acceptance(opt, [&](const diskperc::CriterionResult& r) {
        if (!r.pass) ++failed;
        std::cout << diskperc::format_result(r) << std::endl;
    });
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
