#include "riskbench/complexity.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "riskbench/error.hpp"

namespace riskbench {

const char* to_string(ComplexityKind kind) {
    return kind == ComplexityKind::Rademacher ? "rademacher" : "gaussian";
}

namespace {

void validate_pool(const std::vector<CostVector>& pool, int trials) {
    if (pool.empty()) throw Error(ErrorKind::EmptyPool, "solution pool is empty");
    if (trials < kMinTrials) throw Error(ErrorKind::DomainError, "need at least 100 trials");
    const std::size_t n = pool.front().size();
    if (n == 0) throw Error(ErrorKind::EmptyInput, "cost vectors are empty");
    for (const auto& v : pool) {
        if (v.size() != n) throw Error(ErrorKind::DimensionMismatch, "cost vectors differ in length");
    }
}

double sample_std_error(const std::vector<double>& xs) {
    const double m = static_cast<double>(xs.size());
    CompensatedSum s;
    for (double x : xs) s.add(x);
    const double mean = s.value() / m;
    CompensatedSum ss;
    for (double x : xs) ss.add((x - mean) * (x - mean));
    return xs.size() > 1 ? std::sqrt(ss.value() / (m - 1.0) / m) : 0.0;
}

}  // namespace

RowMat draw_multipliers(ComplexityKind kind, std::size_t n, int trials, SeededRng& rng) {
    RowMat draws(trials, static_cast<Eigen::Index>(n));
    for (Eigen::Index t = 0; t < draws.rows(); ++t) {
        for (Eigen::Index i = 0; i < draws.cols(); ++i) {
            draws(t, i) = kind == ComplexityKind::Rademacher ? rng.sign() : rng.gaussian();
        }
    }
    return draws;
}

std::vector<double> per_trial_sup(const std::vector<CostVector>& pool, const RowMat& draws) {
    const Eigen::Index n = draws.cols();
    Mat V(n, static_cast<Eigen::Index>(pool.size()));
    for (std::size_t c = 0; c < pool.size(); ++c) {
        if (static_cast<Eigen::Index>(pool[c].size()) != n) {
            throw Error(ErrorKind::DimensionMismatch, "cost vector length differs from draw length");
        }
        for (Eigen::Index i = 0; i < n; ++i) V(i, static_cast<Eigen::Index>(c)) = pool[c].values[static_cast<std::size_t>(i)];
    }
    const Mat corr = draws * V;
    std::vector<double> sups(static_cast<std::size_t>(draws.rows()));
    for (Eigen::Index t = 0; t < draws.rows(); ++t) sups[static_cast<std::size_t>(t)] = corr.row(t).maxCoeff() / n;
    return sups;
}

ComplexityEstimate summarize(const std::vector<double>& sups, ComplexityKind kind) {
    ComplexityEstimate e;
    e.kind = kind;
    e.trials = static_cast<int>(sups.size());
    CompensatedSum s;
    for (double x : sups) s.add(x);
    e.value = s.value() / static_cast<double>(sups.size());
    e.std_error = sample_std_error(sups);
    return e;
}

ComplexityEstimate empirical_complexity(const std::vector<CostVector>& pool, ComplexityKind kind, int trials,
                                        SeededRng& rng) {
    validate_pool(pool, trials);
    const RowMat draws = draw_multipliers(kind, pool.front().size(), trials, rng);
    return summarize(per_trial_sup(pool, draws), kind);
}

PairedEstimate paired_complexity(const std::vector<CostVector>& pool, int trials, SeededRng& rng) {
    validate_pool(pool, trials);
    const RowMat g = draw_multipliers(ComplexityKind::Gaussian, pool.front().size(), trials, rng);
    const RowMat r = g.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
    const auto rad = per_trial_sup(pool, r);
    const auto gau = per_trial_sup(pool, g);
    const double factor = std::sqrt(2.0 * std::numbers::pi);
    std::vector<double> diff(rad.size());
    for (std::size_t t = 0; t < rad.size(); ++t) diff[t] = rad[t] - factor * gau[t];
    PairedEstimate out;
    out.rademacher = summarize(rad, ComplexityKind::Rademacher);
    out.gaussian = summarize(gau, ComplexityKind::Gaussian);
    out.difference_std_error = sample_std_error(diff);
    return out;
}

OrthoBasis random_basis(Eigen::Index d, Eigen::Index j, SeededRng& rng) {
    if (j < 1 || j > d) throw Error(ErrorKind::DomainError, "need 1 <= j <= d");
    while (true) {
        Mat G(d, j);
        for (Eigen::Index c = 0; c < j; ++c)
            for (Eigen::Index r = 0; r < d; ++r) G(r, c) = rng.gaussian();
        OrthoBasis B = orthonormalize(G);
        if (B.rank() == j) return B;
    }
}

std::vector<CostVector> rank_j_pool(const PointSet& P, Eigen::Index j, int pool_size, SeededRng& rng) {
    if (pool_size < 1) throw Error(ErrorKind::EmptyPool, "pool_size must be >= 1");
    std::vector<CostVector> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    SubspaceSolution U;
    U.j = j;
    U.z = 2;
    for (int i = 0; i < pool_size; ++i) {
        U.bases.assign(1, random_basis(P.d(), j, rng));
        pool.push_back(subspace_cost(P, U).vec);
    }
    return pool;
}

RankJReport rank_j_pool_check(const PointSet& P, Eigen::Index j, int pool_size, int trials, SeededRng& rng) {
    RankJReport rep;
    rep.n = P.n();
    rep.d = P.d();
    rep.j = j;
    rep.pool_size = pool_size;
    const std::uint64_t tag = rng.next_u64();
    SeededRng pool_rng = rng.derive(hash_combine(tag, 1));
    SeededRng draw_rng = rng.derive(hash_combine(tag, 2));
    const auto pool = rank_j_pool(P, j, pool_size, pool_rng);
    rep.estimate = empirical_complexity(pool, ComplexityKind::Rademacher, trials, draw_rng);
    rep.bound = std::sqrt(static_cast<double>(j) / static_cast<double>(P.n()));
    rep.passed = rep.estimate.value <= rep.bound + 3.0 * rep.estimate.std_error;
    return rep;
}

}  // namespace riskbench
