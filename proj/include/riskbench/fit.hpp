#ifndef RISKBENCH_FIT_HPP
#define RISKBENCH_FIT_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace riskbench {

struct FitRow {
    double k = 0.0;
    double n = 0.0;
    double y = 0.0;
};

struct FitOptions {
    int max_iters = 10'000;
    double rel_tol = 1e-12;
    /// Holds q1 at a fixed value; needed when the rows contain a single k.
    std::optional<double> fix_q1;
};

struct FitResult {
    double c = 0.0, q1 = 0.0, q2 = 0.0;
    double lse = 0.0;
    double initial_lse = 0.0;
    int iterations = 0;
    std::size_t rows = 0;
    std::vector<double> lse_trace;  // accepted iterates, starting at the initial point
};

/// Least-squares fit of y ~ c k^q1 / n^q2 by gradient descent with
/// backtracking in (log c, q1, q2). Starts from q1 = q2 = 0.5.
/// Throws Underdetermined with fewer than 3 rows, fewer than 2 distinct n,
/// or fewer than 2 distinct k while q1 is free.
FitResult fit_power_law(std::vector<FitRow> rows, const FitOptions& opts = {});

}  // namespace riskbench

#endif  // RISKBENCH_FIT_HPP
