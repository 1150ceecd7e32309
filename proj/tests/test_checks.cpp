#include "doctest.h"
#include "riskbench/checks.hpp"

using namespace riskbench;

TEST_CASE("reduced invariant sweeps pass") {
    CHECK(check_decomposition(100, 3).passed);
    CHECK(check_adaptive_projection(20, 3).passed);
    CHECK(check_power_bounds(3000, 3).passed);
    CHECK(check_oracle_equivalence(6, 10, 3).passed);
    CHECK(check_hard_accounting(100, 3).passed);
    CHECK(check_fit_recovery().passed);
}

TEST_CASE("reduction_trial is a function of (seed, trial)") {
    SeededRng a = reduction_trial_rng(9, 4), b = reduction_trial_rng(9, 4);
    const auto x = reduction_trial(a), y = reduction_trial(b);
    CHECK(x.n == y.n);
    CHECK(x.d == y.d);
    CHECK(x.eps == y.eps);
    CHECK(x.m_size == y.m_size);
    CHECK(x.final_potential == y.final_potential);
    CHECK(x.passed());
    SeededRng c = reduction_trial_rng(9, 5);
    CHECK(reduction_trial(c).eps != x.eps);
}

TEST_CASE("hard scaling check reports the fitted exponent") {
    const auto r = check_hard_scaling({64, 256, 1024, 4096}, 200, 1.0, 5, 1);
    CHECK(r.detail.find("q2 = ") != std::string::npos);
    CHECK(r.passed);
}

TEST_CASE("end-to-end check reports every z group") {
    ExperimentConfig cfg;
    cfg.synth.n = 400;
    cfg.synth.d = 3;
    cfg.synth.components = 6;
    cfg.z_grid = {1, 2};
    cfg.k_grid = {2, 4};
    cfg.n_grid = {16, 32, 64};
    cfg.repeats = 2;
    cfg.opt_restarts = 2;
    cfg.solver.gd_iters = 30;
    const auto r = check_end_to_end(cfg);
    CHECK(r.detail.find("z=1: q1 = ") != std::string::npos);
    CHECK(r.detail.find("z=2: q1 = ") != std::string::npos);
    CHECK(r.detail.find("24 rows") != std::string::npos);
}
