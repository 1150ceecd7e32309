#ifndef RISKBENCH_CHECKS_HPP
#define RISKBENCH_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "riskbench/harness.hpp"

namespace riskbench {

/// Outcome of one randomized invariant sweep.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// ||(I-UU^T)p||^2 against the five-term expansion, d <= 10, j <= 3.
CheckResult check_decomposition(int trials, std::uint64_t seed);

/// One random adaptive-projection instance (d <= 30, j <= 4, n <= 100) and its audit.
struct ReductionTrial {
    Eigen::Index n = 0, d = 0, j = 0;
    double eps = 0.0;
    std::size_t m_size = 0;
    std::size_t size_bound = 0;      // ceil(j / eps^2)
    int rounds = 0;
    double final_potential = 0.0;    // ||U^T Pi||_F^2
    double max_ratio = 0.0;          // max ||U^T (I-Pi)p|| / ||(I-Pi)p|| over nonzero residuals
    int guarantee_violations = 0;    // ||U^T(I-Pi)p|| > eps ||(I-Pi)p|| + 1e-9
    int potential_violations = 0;    // trace[t] < eps^2 t - 1e-9, or trace disagrees with Pi
    int t4_violations = 0;
    int t5_violations = 0;
    bool passed() const {
        return m_size <= size_bound && guarantee_violations + potential_violations + t4_violations + t5_violations == 0;
    }
};

ReductionTrial reduction_trial(SeededRng& rng);
/// Stream for trial i, so trials can run in any order.
SeededRng reduction_trial_rng(std::uint64_t seed, int trial);

/// Adaptive projection post-conditions over `trials` instances of reduction_trial.
CheckResult check_adaptive_projection(int trials, std::uint64_t seed);

/// Power triangle inequalities and the cost-difference implications on
/// hypothesis-satisfying random instances with z <= 6.
CheckResult check_power_bounds(int instances, std::uint64_t seed);

/// Best-of-`best_of` seeded EM against erm_oracle_small on random instances
/// with n <= 8, k <= 3, z = 2, both objectives (j <= 2). Passes at 1.05x.
CheckResult check_oracle_equivalence(int instances, int best_of, std::uint64_t seed);

/// excess = p eps B_ex on sampled runs, and analytic OPT against subset
/// enumeration for kj <= 3.
CheckResult check_hard_accounting(int runs, std::uint64_t seed);

/// Fitted n-exponent of the mean hard-instance excess (k = 2, j = 1) with
/// eps = c sqrt(kj/n). Passes when q2 lies in [0.35, 0.65].
CheckResult check_hard_scaling(const std::vector<std::size_t>& n_grid, int repeats, double c, std::uint64_t seed,
                               unsigned threads);

/// Rank-j pool estimate <= sqrt(j/n) + 3 stderr on an (n, j) grid, and the
/// paired Rademacher <= sqrt(2 pi) Gaussian + 5 stderr comparison.
CheckResult check_rademacher(const std::vector<std::size_t>& n_grid, const std::vector<int>& j_grid, Eigen::Index d,
                             int pool, int trials, std::uint64_t seed);

/// Planted (0.03, 0.44, 0.54) over k in {10,20,30,50}, n in 2^6..2^12, recovered within 1e-2.
CheckResult check_fit_recovery();

/// Excess-risk sweep on a synthetic mixture: per z, fitted q1 and q2 in
/// [0.30, 0.70] and the mean excess over repeats strictly decreasing in n for every k.
CheckResult check_end_to_end(const ExperimentConfig& cfg);

}  // namespace riskbench

#endif  // RISKBENCH_CHECKS_HPP
