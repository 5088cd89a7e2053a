#include <cstdio>
#include <vector>

#include "skl/acceptance.hpp"
#include "skl/error.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
    CLI::App app{"End-to-end checks of the kernel toolkit; one pass/fail line per criterion"};
    int criterion = 0;
    app.add_option("--criterion", criterion, "Run a single criterion (1..8) instead of all")
        ->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    std::vector<skl::CriterionResult> results;
    try {
        if (criterion > 0) {
            results.push_back(skl::run_criterion(criterion));
        } else {
            results = skl::run_all_criteria();
        }
    } catch (const skl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    bool all_pass = true;
    for (const skl::CriterionResult& r : results) {
        std::printf("criterion %d: %s (%s)\n", r.id, r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}
