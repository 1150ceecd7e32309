#include "riskbench/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "riskbench/complexity.hpp"
#include "riskbench/error.hpp"
#include "riskbench/format.hpp"
#include "riskbench/hard_instance.hpp"
#include "riskbench/reduction.hpp"
#include "riskbench/seeding.hpp"

namespace riskbench {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Eigen::Index pick(SeededRng& rng, Eigen::Index lo, Eigen::Index hi) {
    return lo + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(hi - lo + 1)));
}

Vec random_in_ball(SeededRng& rng, Eigen::Index d) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.gaussian();
    const double norm = v.norm();
    if (norm == 0.0) return v;
    return v * (std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / norm);
}

RowMat random_points(SeededRng& rng, Eigen::Index n, Eigen::Index d) {
    RowMat m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) m.row(i) = random_in_ball(rng, d).transpose();
    return m;
}

Projector random_projector(SeededRng& rng, Eigen::Index d) {
    const Eigen::Index rank = pick(rng, 0, d);
    if (rank == 0) return Projector::zero(d);
    return Projector(random_basis(d, rank, rng));
}

CheckResult finish(std::string name, bool passed, const std::ostringstream& detail, const Stopwatch& clock) {
    return {std::move(name), passed, detail.str(), clock.seconds()};
}

}  // namespace

CheckResult check_decomposition(int trials, std::uint64_t seed) {
    Stopwatch clock;
    SeededRng rng(seed, 0xdec0);
    double worst = 0.0;
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const Eigen::Index d = pick(rng, 1, 10);
        const Eigen::Index j = pick(rng, 1, std::min<Eigen::Index>(3, d));
        const OrthoBasis U = random_basis(d, j, rng);
        const Projector pi = random_projector(rng, d);
        const Vec p = random_in_ball(rng, d);

        const Mat I = Mat::Identity(d, d);
        const Mat UU = U.matrix() * U.matrix().transpose();
        const Mat PI = pi.materialize();
        const double direct = ((I - UU) * p).squaredNorm();
        const auto terms = decomposition_terms(p, U, pi);
        const double dense[5] = {(PI * p).squaredNorm(), (U.matrix().transpose() * PI * p).squaredNorm(),
                                 ((I - PI) * p).squaredNorm(), (UU * (I - PI) * p).squaredNorm(),
                                 2.0 * p.dot(PI * UU * (I - PI) * p)};
        const double got[5] = {terms.t1, terms.t2, terms.t3, terms.t4, terms.t5};
        double err = std::abs(terms.sum() - direct);
        for (int i = 0; i < 5; ++i) err = std::max(err, std::abs(got[i] - dense[i]));
        worst = std::max(worst, err);
        if (!(err < 1e-9)) ++violations;
    }
    std::ostringstream detail;
    detail << trials << " trials, max residual " << format_double(worst) << ", violations " << violations;
    return finish("decomposition", violations == 0, detail, clock);
}

SeededRng reduction_trial_rng(std::uint64_t seed, int trial) {
    return SeededRng(seed, hash_combine(0xada9, static_cast<std::uint64_t>(trial)));
}

ReductionTrial reduction_trial(SeededRng& rng) {
    ReductionTrial t;
    t.d = pick(rng, 2, 30);
    t.j = pick(rng, 1, std::min<Eigen::Index>(4, t.d));
    t.n = pick(rng, 1, 100);
    t.eps = 0.15 + 0.8 * rng.uniform();
    const PointSet P(random_points(rng, t.n, t.d));
    const OrthoBasis U = random_basis(t.d, t.j, rng);
    const auto r = adaptive_projection(P, U, t.eps);
    t.m_size = r.M.size();
    t.size_bound = static_cast<std::size_t>(std::ceil(static_cast<double>(t.j) / (t.eps * t.eps)));
    t.rounds = r.rounds;

    const Mat pi = r.pi.materialize();
    const Mat rest_op = Mat::Identity(t.d, t.d) - pi;
    const Mat UU = U.matrix() * U.matrix().transpose();
    for (Eigen::Index i = 0; i < t.n; ++i) {
        const Vec p = P.row(i).transpose();
        const Vec rest = rest_op * p;
        const double along = (U.matrix().transpose() * rest).norm();
        if (rest.norm() > 0.0) t.max_ratio = std::max(t.max_ratio, along / rest.norm());
        if (along > t.eps * rest.norm() + 1e-9) ++t.guarantee_violations;
        if ((UU * rest).squaredNorm() > t.eps * t.eps * rest.squaredNorm() + 1e-9) ++t.t4_violations;
        if (std::abs(2.0 * p.dot(pi * UU * rest)) > 2.0 * t.eps * p.norm() * rest.norm() + 1e-9) ++t.t5_violations;
    }
    if (r.potential_trace.size() != r.M.size() + 1) ++t.potential_violations;
    for (std::size_t s = 0; s < r.potential_trace.size(); ++s) {
        if (r.potential_trace[s] < t.eps * t.eps * static_cast<double>(s) - 1e-9) ++t.potential_violations;
    }
    t.final_potential = (U.matrix().transpose() * pi).squaredNorm();
    if (std::abs(t.final_potential - r.potential_trace.back()) > 1e-9) ++t.potential_violations;
    return t;
}

CheckResult check_adaptive_projection(int trials, std::uint64_t seed) {
    Stopwatch clock;
    int guarantee = 0, size = 0, potential = 0, terms = 0;
    std::size_t max_m = 0;
    for (int i = 0; i < trials; ++i) {
        SeededRng rng = reduction_trial_rng(seed, i);
        const auto t = reduction_trial(rng);
        max_m = std::max(max_m, t.m_size);
        guarantee += t.guarantee_violations;
        potential += t.potential_violations;
        terms += t.t4_violations + t.t5_violations;
        if (t.m_size > t.size_bound) ++size;
    }
    std::ostringstream detail;
    detail << trials << " trials, guarantee violations " << guarantee << ", size violations " << size
           << ", potential violations " << potential << ", t4/t5 violations " << terms << ", max |M| " << max_m;
    return finish("adaptive_projection", guarantee + size + potential + terms == 0, detail, clock);
}

CheckResult check_power_bounds(int instances, std::uint64_t seed) {
    Stopwatch clock;
    SeededRng rng(seed, 0x90e5);
    int violations = 0;
    std::map<std::string, int> applied;
    double min_slack = std::numeric_limits<double>::infinity();
    auto absorb = [&](const BoundReport& rep) {
        for (const auto& c : rep.checks) {
            if (!c.hypothesis_holds) continue;
            ++applied[c.name];
            min_slack = std::min(min_slack, c.slack());
            if (!c.satisfied) ++violations;
        }
    };
    for (int t = 0; t < instances; ++t) {
        const int z = 1 + static_cast<int>(rng.index(6));
        const double eps = std::exp(-8.0 * rng.uniform());
        switch (t % 3) {
            case 0:
            case 1: {
                // a^2 = b^2 +- h with h inside the linear-gap (case 0) or rescaled (case 1) hypothesis
                const double b = 2.0 * rng.uniform();
                const double h = t % 3 == 0 ? eps * b
                                            : std::max(eps * b, eps * eps) / (4.0 * std::pow(3.0 * z, z));
                double a2 = b * b + rng.sign() * rng.uniform() * h;
                a2 = std::clamp(a2, 0.0, 4.0);
                absorb(power_bound_check(std::sqrt(a2), b, z, eps));
                break;
            }
            default: {
                const Eigen::Index d = pick(rng, 1, 6);
                const Vec a = random_in_ball(rng, d), b = random_in_ball(rng, d), c = random_in_ball(rng, d);
                absorb(triangle_power_check((a - b).norm(), (a - c).norm(), (b - c).norm(), z, eps));
                break;
            }
        }
    }
    std::ostringstream detail;
    detail << instances << " instances, violations " << violations << ", min slack " << format_double(min_slack)
           << ", applied";
    for (const auto& [name, count] : applied) detail << ' ' << name << '=' << count;
    return finish("power_bounds", violations == 0, detail, clock);
}

CheckResult check_oracle_equivalence(int instances, int best_of, std::uint64_t seed) {
    Stopwatch clock;
    SeededRng rng(seed, 0x0ac1e);
    int failures = 0;
    double worst_ratio = 0.0;
    std::ostringstream missed;
    for (int t = 0; t < instances; ++t) {
        ProblemSpec spec;
        spec.family = t % 2 == 0 ? ObjectiveFamily::Center : ObjectiveFamily::Subspace;
        spec.z = 2;
        spec.k = static_cast<int>(pick(rng, 1, 3));
        const Eigen::Index d = pick(rng, 1, 4);
        spec.j = static_cast<int>(pick(rng, 1, std::min<Eigen::Index>(2, d)));
        const Eigen::Index n = pick(rng, spec.k, 8);
        const PointSet P(random_points(rng, n, d));

        const ObjectiveKind objective = spec.family == ObjectiveFamily::Center ? ObjectiveKind(CenterObjective{})
                                                                               : ObjectiveKind(SubspaceObjective{spec.j});
        const double oracle = erm_oracle_small(P, spec.k, spec.z, objective).cost;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < best_of; ++r) {
            SeededRng run(seed, hash_combine(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r)));
            best = std::min(best, solve_once(P, spec, run, SolverOptions{}).second);
        }
        // ratios against a zero-cost oracle only measure rounding
        if (oracle > 1e-9) worst_ratio = std::max(worst_ratio, best / oracle);
        if (best > 1.05 * oracle + 1e-12) {
            ++failures;
            missed << " [#" << t << ' ' << to_string(spec.family) << " k=" << spec.k;
            if (spec.family == ObjectiveFamily::Subspace) missed << " j=" << spec.j;
            missed << " d=" << d << " n=" << n << " ratio " << format_double(best / oracle) << ']';
        }
    }
    std::ostringstream detail;
    detail << instances << " instances, best-of-" << best_of << ", failures " << failures << ", worst ratio "
           << format_double(worst_ratio) << missed.str();
    return finish("oracle_equivalence", failures == 0, detail, clock);
}

CheckResult check_hard_accounting(int runs, std::uint64_t seed) {
    Stopwatch clock;
    SeededRng rng(seed, 0x4a7d);
    int identity_failures = 0, opt_failures = 0, opt_cases = 0;
    double worst = 0.0;
    for (int k = 1; k <= 3; ++k)
        for (int j = 1; k * j <= 3; ++j)
            for (double eps : {0.0, 0.05, 0.3, 0.7, 0.95}) {
                const auto inst = build_hard_instance(k, j, eps);
                // brute force over every kj-subset of axes the solution may cover
                const int d = static_cast<int>(inst.d);
                double brute = std::numeric_limits<double>::infinity();
                for (unsigned mask = 0; mask < (1u << d); ++mask) {
                    if (std::popcount(mask) != inst.kj()) continue;
                    double uncovered = 0.0;
                    for (int a = 0; a < d; ++a)
                        if (!(mask & (1u << a))) uncovered += inst.masses[static_cast<std::size_t>(a)];
                    brute = std::min(brute, uncovered);
                }
                ++opt_cases;
                if (std::abs(analytic_opt(inst) - brute) > 1e-12) ++opt_failures;
            }
    for (int t = 0; t < runs; ++t) {
        const int k = 1 + static_cast<int>(rng.index(4));
        const int j = 1 + static_cast<int>(rng.index(3));
        const double eps = 0.99 * rng.uniform();
        const auto inst = build_hard_instance(k, j, eps);
        const auto sample = sample_hard(inst, 1 + rng.index(2000), rng);
        const auto erm = erm_hard(inst, sample.counts);
        const double err = std::abs(erm.excess - inst.p * eps * erm.b_ex);
        worst = std::max(worst, err);
        if (err > 1e-12) ++identity_failures;
    }
    std::ostringstream detail;
    detail << runs << " sampled runs, identity failures " << identity_failures << " (max error "
           << format_double(worst) << "), OPT mismatches " << opt_failures << " of " << opt_cases;
    return finish("hard_accounting", identity_failures + opt_failures == 0, detail, clock);
}

CheckResult check_hard_scaling(const std::vector<std::size_t>& n_grid, int repeats, double c, std::uint64_t seed,
                               unsigned threads) {
    Stopwatch clock;
    HardScalingConfig cfg;
    cfg.k = 2;
    cfg.j = 1;
    cfg.eps = {HardEps::scaled(c)};
    cfg.n_grid = n_grid;
    cfg.repeats = repeats;
    cfg.seed = seed;
    cfg.threads = threads;
    const auto rows = hard_scaling_experiment(cfg);
    std::map<std::size_t, double> mean;
    for (const auto& r : rows) mean[r.n] += r.excess / static_cast<double>(repeats);
    std::vector<FitRow> fit_rows;
    for (const auto& [n, y] : mean) fit_rows.push_back({static_cast<double>(cfg.k * cfg.j), static_cast<double>(n), y});
    FitOptions opts;
    opts.fix_q1 = 0.0;
    const auto fit = fit_power_law(fit_rows, opts);
    const bool passed = fit.q2 >= 0.35 && fit.q2 <= 0.65;
    std::ostringstream detail;
    detail << "k=2 j=1 eps=" << format_double(c) << "*sqrt(kj/n), " << repeats << " repeats x " << n_grid.size()
           << " n, q2 = " << format_double(fit.q2);
    return finish("hard_scaling", passed, detail, clock);
}

CheckResult check_rademacher(const std::vector<std::size_t>& n_grid, const std::vector<int>& j_grid, Eigen::Index d,
                             int pool, int trials, std::uint64_t seed) {
    Stopwatch clock;
    int bound_failures = 0, paired_failures = 0, cells = 0;
    double worst_ratio = 0.0;
    for (std::size_t n : n_grid) {
        SeededRng data_rng(seed, hash_combine(0xda7a, n));
        const PointSet P(random_points(data_rng, static_cast<Eigen::Index>(n), d));
        for (int j : j_grid) {
            ++cells;
            SeededRng rng(seed, hash_combine(hash_combine(0x7ade, n), static_cast<std::uint64_t>(j)));
            const auto report = rank_j_pool_check(P, j, pool, trials, rng);
            if (!report.passed) ++bound_failures;
            worst_ratio = std::max(worst_ratio, report.estimate.value / report.bound);

            const auto vectors = rank_j_pool(P, j, pool, rng);
            const auto paired = paired_complexity(vectors, trials, rng);
            if (paired.rademacher.value >
                std::sqrt(2.0 * std::numbers::pi) * paired.gaussian.value + 5.0 * paired.difference_std_error) {
                ++paired_failures;
            }
        }
    }
    std::ostringstream detail;
    detail << cells << " (n, j) cells, d=" << d << ", pool " << pool << ", " << trials
           << " trials, bound failures " << bound_failures << ", paired failures " << paired_failures
           << ", max estimate/bound " << format_double(worst_ratio);
    return finish("rademacher", bound_failures + paired_failures == 0, detail, clock);
}

CheckResult check_fit_recovery() {
    Stopwatch clock;
    const double c = 0.03, q1 = 0.44, q2 = 0.54;
    std::vector<FitRow> rows;
    for (double k : {10.0, 20.0, 30.0, 50.0})
        for (int e = 6; e <= 12; ++e) {
            const double n = std::ldexp(1.0, e);
            rows.push_back({k, n, c * std::pow(k, q1) / std::pow(n, q2)});
        }
    const auto f = fit_power_law(rows);
    const bool passed = std::abs(f.c - c) <= 1e-2 && std::abs(f.q1 - q1) <= 1e-2 && std::abs(f.q2 - q2) <= 1e-2;
    std::ostringstream detail;
    detail << "c = " << format_double(f.c) << ", q1 = " << format_double(f.q1) << ", q2 = " << format_double(f.q2)
           << ", " << f.iterations << " iterations";
    return finish("fit_recovery", passed, detail, clock);
}

CheckResult check_end_to_end(const ExperimentConfig& cfg) {
    Stopwatch clock;
    const auto result = run_experiment(cfg, {});
    bool passed = true;
    std::ostringstream detail;
    for (const auto& [key, rows] : mean_excess_by_group(result.rows)) {
        const auto fit = fit_power_law(rows);
        const bool window = fit.q1 >= 0.30 && fit.q1 <= 0.70 && fit.q2 >= 0.30 && fit.q2 <= 0.70;
        // rows are grouped by k with n ascending
        std::map<double, std::vector<std::pair<double, double>>> by_k;
        for (const auto& r : rows) by_k[r.k].push_back({r.n, r.y});
        bool decreasing = true;
        for (auto& [k, series] : by_k) {
            std::sort(series.begin(), series.end());
            for (std::size_t i = 1; i < series.size(); ++i) {
                if (!(series[i].second < series[i - 1].second)) decreasing = false;
            }
        }
        passed = passed && window && decreasing;
        detail << "z=" << std::get<2>(key) << ": q1 = " << format_double(fit.q1) << ", q2 = " << format_double(fit.q2)
               << ", c = " << format_double(fit.c) << (decreasing ? ", means decreasing; " : ", means NOT decreasing; ");
    }
    detail << result.rows.size() << " rows";
    return finish("end_to_end", passed && !result.rows.empty(), detail, clock);
}

}  // namespace riskbench
