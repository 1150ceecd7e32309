#ifndef RISKBENCH_HARD_INSTANCE_HPP
#define RISKBENCH_HARD_INSTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "riskbench/objectives.hpp"
#include "riskbench/rng.hpp"

namespace riskbench {

/// Distribution on the 2kj standard basis vectors of R^(2kj): the first kj
/// axes ("good") carry mass p, the other kj ("bad") carry p(1 - eps).
struct HardInstance {
    int k = 1, j = 1;
    double eps = 0.0;
    Eigen::Index d = 2;
    double p = 0.5;
    std::vector<double> masses;
    int kj() const { return k * j; }
    bool is_good(int axis) const { return axis < kj(); }
};

/// p = 1 / (kj (2 - eps)). Throws DomainError unless k, j >= 1 and 0 <= eps < 1.
HardInstance build_hard_instance(int k, int j, double eps);

/// kj p (1 - eps)
double analytic_opt(const HardInstance& inst);

struct HardSample {
    PointSet points;  // one standard basis vector per row
    std::vector<std::size_t> counts;
};

/// Multinomial counts over the d axes.
std::vector<std::size_t> sample_hard_counts(const HardInstance& inst, std::size_t n, SeededRng& rng);
HardSample sample_hard(const HardInstance& inst, std::size_t n, SeededRng& rng);

struct HardErm {
    std::vector<int> chosen;  // kj axes, in selection order
    double empirical_cost = 0.0;  // unselected sample fraction
    double dist_cost = 0.0;       // unselected mass
    double excess = 0.0;          // dist_cost - analytic_opt
    int b_ex = 0;                 // bad axes selected
};

/// Exact ERM: keep the kj axes with the largest counts, ties to good axes then
/// lower index. Throws DomainError if counts.size() != d.
HardErm erm_hard(const HardInstance& inst, const std::vector<std::size_t>& counts);

/// Either a fixed eps or eps = c * sqrt(kj / n) per sample size.
struct HardEps {
    bool relative = false;
    double value = 0.0;
    static HardEps absolute(double eps) { return {false, eps}; }
    static HardEps scaled(double c) { return {true, c}; }
    double at(int kj, std::size_t n) const;
    /// "hard-eps=<v>" or "hard-c=<v>", used as the dataset column.
    std::string label() const;
};

struct HardScalingConfig {
    int k = 2, j = 1;
    std::vector<HardEps> eps;
    std::vector<std::size_t> n_grid;
    int repeats = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct HardRow {
    std::string dataset;
    double eps = 0.0;
    std::size_t n = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    int b_ex = 0;
    double empirical_cost = 0.0;
    double dist_cost = 0.0;
    double excess = 0.0;
};

/// Rows ordered by (eps entry, n, repeat). Each row draws from
/// SeededRng(cfg.seed, row seed), so output is independent of thread count.
std::vector<HardRow> hard_scaling_experiment(const HardScalingConfig& cfg);

}  // namespace riskbench

#endif  // RISKBENCH_HARD_INSTANCE_HPP
