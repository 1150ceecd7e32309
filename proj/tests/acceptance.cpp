// Acceptance suite: one PASS/FAIL line per criterion, each with its wall-clock budget.
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "riskbench/checks.hpp"
#include "riskbench/parallel.hpp"

using namespace riskbench;

namespace {

struct Criterion {
    int id;
    double budget_seconds;
    std::function<CheckResult()> run;
};

ExperimentConfig desk_config() {
    const std::string path = std::string(RISKBENCH_SOURCE_DIR) + "/configs/desk_replication.conf";
    std::ifstream f(path);
    ExperimentConfig base;
    base.threads = default_threads();
    return parse_config(f, path, base);
}

}  // namespace

int main() {
    const std::uint64_t seed = 1;
    const unsigned threads = default_threads();
    const std::vector<Criterion> criteria = {
        {1, 5.0, [&] { return check_decomposition(1000, seed); }},
        {2, 30.0, [&] { return check_adaptive_projection(200, seed); }},
        {3, 10.0, [&] { return check_power_bounds(100000, seed); }},
        {4, 120.0, [&] { return check_oracle_equivalence(50, 20, seed); }},
        {5, 60.0, [&] { return check_hard_accounting(5000, seed); }},
        {6, 600.0,
         [&] {
             std::vector<std::size_t> n_grid;
             for (std::size_t n = 64; n <= 16384; n *= 2) n_grid.push_back(n);
             return check_hard_scaling(n_grid, 500, 1.0, seed, threads);
         }},
        {7, 300.0, [&] { return check_rademacher({64, 128, 256}, {1, 2, 3}, 8, 200, 2000, seed); }},
        {8, 10.0, [] { return check_fit_recovery(); }},
        {9, 1800.0, [] { return check_end_to_end(desk_config()); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        CheckResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.name = "exception";
            r.passed = false;
            r.detail = e.what();
        }
        const bool in_time = r.seconds < c.budget_seconds;
        const bool ok = r.passed && in_time;
        if (!ok) ++failed;
        std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s%s]\n", ok ? "PASS" : "FAIL", c.id, r.name.c_str(),
                    r.detail.c_str(), r.seconds, c.budget_seconds, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
