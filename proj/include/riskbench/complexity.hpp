#ifndef RISKBENCH_COMPLEXITY_HPP
#define RISKBENCH_COMPLEXITY_HPP

#include <vector>

#include "riskbench/objectives.hpp"
#include "riskbench/rng.hpp"

namespace riskbench {

enum class ComplexityKind { Rademacher, Gaussian };

const char* to_string(ComplexityKind kind);

/// Monte-Carlo estimate of (1/n) E sup_{v in pool} <v, r>.
struct ComplexityEstimate {
    double value = 0.0;
    double std_error = 0.0;  // sample std of the per-trial sups / sqrt(trials)
    int trials = 0;
    ComplexityKind kind = ComplexityKind::Rademacher;
};

constexpr int kMinTrials = 100;

/// trials x n matrix of random signs or standard Gaussians.
RowMat draw_multipliers(ComplexityKind kind, std::size_t n, int trials, SeededRng& rng);

/// (1/n) max_v <v, draws.row(t)> for each trial t.
std::vector<double> per_trial_sup(const std::vector<CostVector>& pool, const RowMat& draws);

ComplexityEstimate summarize(const std::vector<double>& sups, ComplexityKind kind);

/// Throws EmptyPool, DimensionMismatch on ragged pools, DomainError when trials < kMinTrials.
ComplexityEstimate empirical_complexity(const std::vector<CostVector>& pool, ComplexityKind kind, int trials,
                                        SeededRng& rng);

/// Both estimates from shared draws: g Gaussian and r = sign(g).
struct PairedEstimate {
    ComplexityEstimate rademacher;
    ComplexityEstimate gaussian;
    /// Standard error of the per-trial difference rad_t - sqrt(2 pi) gauss_t.
    double difference_std_error = 0.0;
};

PairedEstimate paired_complexity(const std::vector<CostVector>& pool, int trials, SeededRng& rng);

/// Orthonormal d x j basis from a Gaussian matrix.
OrthoBasis random_basis(Eigen::Index d, Eigen::Index j, SeededRng& rng);

/// Cost vectors f_U(p) = ||(I - UU^T)p||^2 for pool_size random rank-j bases.
std::vector<CostVector> rank_j_pool(const PointSet& P, Eigen::Index j, int pool_size, SeededRng& rng);

struct RankJReport {
    Eigen::Index n = 0, d = 0, j = 0;
    int pool_size = 0;
    ComplexityEstimate estimate;
    double bound = 0.0;  // sqrt(j / n)
    bool passed = false; // estimate <= bound + 3 std_error
};

RankJReport rank_j_pool_check(const PointSet& P, Eigen::Index j, int pool_size, int trials, SeededRng& rng);

}  // namespace riskbench

#endif  // RISKBENCH_COMPLEXITY_HPP
