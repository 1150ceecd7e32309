#include "doctest.h"
#include "oracles.hpp"
#include "riskbench/error.hpp"
#include "riskbench/harness.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace riskbench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("riskbench_harness_" + tag + "_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "# comment\n"
        "dataset = synthetic\n"
        "objective = subspace   # trailing comment\n"
        "z = 1,2\n"
        "j_grid = 1,2\n"
        "k = 10,20,30,50\n"
        "n = 64:4096:x2\n"
        "repeats = 3\n"
        "seed = 42\n"
        "synth_n = 500\n"
        "gd_learning_rate = 0.02\n"
        "with_replacement = true\n");
    const auto cfg = parse_config(in, "cfg");
    CHECK(cfg.objective == ObjectiveFamily::Subspace);
    CHECK(cfg.z_grid == std::vector<int>{1, 2});
    CHECK(cfg.j_grid == std::vector<int>{1, 2});
    CHECK(cfg.k_grid == std::vector<int>{10, 20, 30, 50});
    CHECK(cfg.n_grid == std::vector<std::size_t>{64, 128, 256, 512, 1024, 2048, 4096});
    CHECK(cfg.repeats == 3);
    CHECK(cfg.opt_restarts == 10);
    CHECK(cfg.seed == 42);
    CHECK(cfg.synth.n == 500);
    CHECK(cfg.solver.gd_learning_rate == 0.02);
    CHECK(cfg.with_replacement);

    std::istringstream unknown("repeats = 2\nbogus = 1\n");
    try {
        parse_config(unknown, "cfg");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    for (const char* text : {"repeats = x\n", "repeats = 0\n", "n = 64:32:x2\n", "n = 1:8:x1\n", "k\n", "objective = line\n"}) {
        std::istringstream bad(text);
        CHECK_THROWS_AS(parse_config(bad, "cfg"), Error);
    }
}

TEST_CASE("estimate_opt_full examples") {
    RowMat m(3, 2);
    m << 0.1, 0.2, -0.5, 0.3, 0.7, -0.1;
    for (int z : {1, 2, 3}) {
        const auto est = estimate_opt_full(PointSet(m), {ObjectiveFamily::Center, 3, 0, z}, 3, 1, {});
        CHECK(est.opt_value == 0.0);
    }

    SeededRng rng(2);
    const PointSet P(oracle::random_matrix(rng, 200, 3) * 0.5);
    const ProblemSpec spec{ObjectiveFamily::Center, 5, 0, 2};
    const auto ten = estimate_opt_full(P, spec, 10, 3, {});
    const auto one = estimate_opt_full(P, spec, 1, 3, {});
    CHECK(ten.opt_value <= one.opt_value);
    CHECK(ten.restart_values.front() == one.restart_values.front());

    RowMat line(8, 1);
    for (Eigen::Index i = 0; i < 8; ++i) line(i, 0) = 2.0 * rng.uniform() - 1.0;
    const PointSet L(line);
    const auto est = estimate_opt_full(L, {ObjectiveFamily::Center, 2, 0, 2}, 10, 4, {});
    const double oracle = erm_oracle_small(L, 2, 2, CenterObjective{}).cost / 8.0;
    CHECK(est.opt_value <= 1.05 * oracle + 1e-15);

    const auto sub = estimate_opt_full(P, {ObjectiveFamily::Subspace, 2, 1, 2}, 3, 5, {});
    CHECK(std::holds_alternative<SubspaceSolution>(sub.solution));
    CHECK(sub.opt_value == doctest::Approx(solution_cost(P, sub.solution) / 200.0));
}

TEST_CASE("excess_risk_curve basics") {
    SeededRng rng(6);
    const PointSet P(oracle::random_matrix(rng, 100, 2) * 0.6, "cloud");
    ExperimentConfig cfg;
    cfg.k_grid = {3};
    cfg.n_grid = {20};
    cfg.repeats = 1;
    cfg.opt_restarts = 2;
    auto res = excess_risk_curve(P, cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].dataset == "cloud");
    CHECK(res.rows[0].objective == "center");
    CHECK(res.rows[0].j == 0);
    CHECK(res.rows[0].excess == doctest::Approx(res.rows[0].full_cost - res.opts[0].opt_value));

    // training on all of P repeats the OPT runs exactly
    cfg.n_grid = {100};
    cfg.repeats = 3;
    cfg.z_grid = {1, 2};
    res = excess_risk_curve(P, cfg);
    for (const auto& r : res.rows) CHECK(r.excess <= 0.0);

    cfg.n_grid = {101};
    CHECK_THROWS_AS(excess_risk_curve(P, cfg), Error);
    cfg.with_replacement = true;
    CHECK(excess_risk_curve(P, cfg).rows.size() == 6);
}

TEST_CASE("excess_risk_curve with trained runs in the OPT pool") {
    SeededRng rng(7);
    const PointSet P(oracle::random_matrix(rng, 150, 3) * 0.5);
    ExperimentConfig cfg;
    cfg.objective = ObjectiveFamily::Subspace;
    cfg.j_grid = {1};
    cfg.k_grid = {2};
    cfg.n_grid = {10, 40};
    cfg.repeats = 4;
    cfg.opt_restarts = 1;
    cfg.opt_includes_trained = true;
    const auto res = excess_risk_curve(P, cfg);
    for (const auto& [key, rows] : mean_excess_by_group(res.rows)) {
        for (const auto& r : rows) CHECK(r.y >= -1e-9);
    }
    // samples are distinct indices: without replacement a full-size sample is P itself
    for (const auto& r : res.rows) CHECK(r.full_cost >= res.opts[0].opt_value);
}

TEST_CASE("planted mixture: mean excess decreases with n") {
    ExperimentConfig cfg;
    cfg.synth.n = 3000;
    cfg.synth.d = 2;
    cfg.synth.components = 4;
    cfg.synth.spread = 0.05;
    cfg.synth.seed = 3;
    const PointSet P = make_synthetic(cfg.synth);
    CHECK(P.in_unit_ball());
    cfg.k_grid = {4};
    cfg.n_grid = {16, 64, 256, 1024};
    cfg.repeats = 12;
    cfg.opt_restarts = 5;
    const auto res = excess_risk_curve(P, cfg);
    std::vector<double> mean(4, 0.0), sq(4, 0.0);
    for (const auto& r : res.rows) {
        const std::size_t g = r.n == 16 ? 0 : r.n == 64 ? 1 : r.n == 256 ? 2 : 3;
        mean[g] += r.excess / 12.0;
        sq[g] += r.excess * r.excess / 12.0;
    }
    for (std::size_t g = 0; g + 1 < 4; ++g) {
        const double se = std::sqrt(std::max(0.0, sq[g] - mean[g] * mean[g]) / 11.0 +
                                    std::max(0.0, sq[g + 1] - mean[g + 1] * mean[g + 1]) / 11.0);
        CHECK(mean[g + 1] <= mean[g] + 2.0 * se);
    }
    CHECK(mean[3] < mean[0]);
}

TEST_CASE("run_experiment writes deterministic csv and metadata") {
    const fs::path dir = temp_dir("run");
    ExperimentConfig cfg;
    cfg.synth.n = 400;
    cfg.synth.d = 3;
    cfg.synth.components = 3;
    cfg.z_grid = {1, 2};
    cfg.k_grid = {2, 3};
    cfg.n_grid = {16, 32};
    cfg.repeats = 2;
    cfg.opt_restarts = 2;
    cfg.seed = 9;
    const auto a = run_experiment(cfg, dir / "a.csv");
    cfg.threads = 3;
    run_experiment(cfg, dir / "b.csv");
    CHECK(a.rows.size() == 2u * 2u * 2u * 2u);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv.meta.json") == slurp(dir / "b.csv.meta.json"));
    const std::string csv = slurp(dir / "a.csv");
    CHECK(csv.rfind(std::string(kRiskCsvHeader) + "\n", 0) == 0);
    const std::string meta = slurp(dir / "a.csv.meta.json");
    CHECK(meta.find("without replacement") != std::string::npos);
    CHECK(meta.find("volume-sampling surrogate") != std::string::npos);
    CHECK(meta.find("content_hash") != std::string::npos);

    std::istringstream in(csv);
    const auto back = read_risk_csv(in, "a.csv");
    REQUIRE(back.size() == a.rows.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].excess == a.rows[i].excess);
        CHECK(back[i].seed == a.rows[i].seed);
        CHECK(back[i].k == a.rows[i].k);
    }

    ExperimentConfig tiny;
    tiny.synth.n = 50;
    tiny.k_grid = {2};
    tiny.n_grid = {10};
    tiny.repeats = 1;
    tiny.opt_restarts = 1;
    run_experiment(tiny, dir / "tiny.csv");
    std::istringstream t(slurp(dir / "tiny.csv"));
    CHECK(read_risk_csv(t, "tiny").size() == 1);
    fs::remove_all(dir);
}

TEST_CASE("run_experiment loads files and surfaces paths in errors") {
    const fs::path dir = temp_dir("file");
    {
        std::ofstream f(dir / "pts.csv");
        SeededRng rng(10);
        for (int i = 0; i < 60; ++i) f << 5.0 * rng.uniform() << ',' << 3.0 * rng.gaussian() << ",1\n";
    }
    ExperimentConfig cfg;
    cfg.dataset = (dir / "pts.csv").string();
    cfg.label_col = LabelColumn::Last;
    cfg.k_grid = {2};
    cfg.n_grid = {20};
    cfg.repeats = 1;
    cfg.opt_restarts = 1;
    const auto res = run_experiment(cfg, dir / "out.csv");
    CHECK(res.d == 2);
    CHECK(res.rows[0].dataset == "pts.csv");
    cfg.dataset = (dir / "missing.csv").string();
    try {
        run_experiment(cfg, dir / "out2.csv");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoError);
        CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
    }
    fs::remove_all(dir);
}
