#include "riskbench/hard_instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskbench/error.hpp"
#include "riskbench/format.hpp"
#include "riskbench/parallel.hpp"

namespace riskbench {

HardInstance build_hard_instance(int k, int j, double eps) {
    if (k < 1 || j < 1) throw Error(ErrorKind::DomainError, "k and j must be >= 1");
    if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorKind::DomainError, "eps must lie in [0, 1)");
    HardInstance h;
    h.k = k;
    h.j = j;
    h.eps = eps;
    const int kj = k * j;
    h.d = 2 * kj;
    h.p = 1.0 / (kj * (2.0 - eps));
    h.masses.assign(static_cast<std::size_t>(h.d), h.p);
    for (int a = kj; a < 2 * kj; ++a) h.masses[static_cast<std::size_t>(a)] = h.p * (1.0 - eps);
    return h;
}

double analytic_opt(const HardInstance& inst) {
    return inst.kj() * inst.p * (1.0 - inst.eps);
}

std::vector<std::size_t> sample_hard_counts(const HardInstance& inst, std::size_t n, SeededRng& rng) {
    std::vector<double> cdf(inst.masses.size());
    std::partial_sum(inst.masses.begin(), inst.masses.end(), cdf.begin());
    std::vector<std::size_t> counts(inst.masses.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * cdf.back();
        std::size_t a = 0;
        while (a + 1 < cdf.size() && u >= cdf[a]) ++a;
        counts[a]++;
    }
    return counts;
}

HardSample sample_hard(const HardInstance& inst, std::size_t n, SeededRng& rng) {
    std::vector<double> cdf(inst.masses.size());
    std::partial_sum(inst.masses.begin(), inst.masses.end(), cdf.begin());
    HardSample s;
    s.counts.assign(inst.masses.size(), 0);
    RowMat pts = RowMat::Zero(static_cast<Eigen::Index>(n), inst.d);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * cdf.back();
        std::size_t a = 0;
        while (a + 1 < cdf.size() && u >= cdf[a]) ++a;
        s.counts[a]++;
        pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = 1.0;
    }
    s.points = PointSet(std::move(pts), "hard");
    return s;
}

HardErm erm_hard(const HardInstance& inst, const std::vector<std::size_t>& counts) {
    if (static_cast<Eigen::Index>(counts.size()) != inst.d) {
        throw Error(ErrorKind::DomainError, "counts length must equal 2kj");
    }
    std::vector<int> order(counts.size());
    std::iota(order.begin(), order.end(), 0);
    // good axes precede bad ones by index, so index order already breaks ties toward good
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    });
    HardErm r;
    const int kj = inst.kj();
    r.chosen.assign(order.begin(), order.begin() + kj);
    std::vector<bool> picked(counts.size(), false);
    for (int a : r.chosen) {
        picked[static_cast<std::size_t>(a)] = true;
        if (!inst.is_good(a)) r.b_ex++;
    }
    CompensatedSum dist, emp;
    std::size_t total = 0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
        total += counts[a];
        if (picked[a]) continue;
        dist.add(inst.masses[a]);
        emp.add(static_cast<double>(counts[a]));
    }
    r.dist_cost = dist.value();
    r.empirical_cost = total > 0 ? emp.value() / static_cast<double>(total) : 0.0;
    r.excess = r.dist_cost - analytic_opt(inst);
    return r;
}

double HardEps::at(int kj, std::size_t n) const {
    const double eps = relative ? value * std::sqrt(static_cast<double>(kj) / static_cast<double>(n)) : value;
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw Error(ErrorKind::DomainError, "eps = " + format_double(eps) + " at n = " + std::to_string(n) +
                                                " is outside [0, 1)");
    }
    return eps;
}

std::string HardEps::label() const {
    return (relative ? "hard-c=" : "hard-eps=") + format_shortest(value);
}

std::vector<HardRow> hard_scaling_experiment(const HardScalingConfig& cfg) {
    if (cfg.eps.empty() || cfg.n_grid.empty()) throw Error(ErrorKind::EmptyInput, "eps and n grids must be nonempty");
    if (cfg.repeats < 1) throw Error(ErrorKind::DomainError, "repeats must be >= 1");
    const int kj = cfg.k * cfg.j;
    // validate every eps before doing any work
    for (const auto& e : cfg.eps)
        for (std::size_t n : cfg.n_grid) {
            if (n < 1) throw Error(ErrorKind::DomainError, "n must be >= 1");
            build_hard_instance(cfg.k, cfg.j, e.at(kj, n));
        }

    const std::size_t reps = static_cast<std::size_t>(cfg.repeats);
    const std::size_t total = cfg.eps.size() * cfg.n_grid.size() * reps;
    std::vector<HardRow> rows(total);
    parallel_for(total, cfg.threads, [&](std::size_t idx) {
        const std::size_t e = idx / (cfg.n_grid.size() * reps);
        const std::size_t ni = (idx / reps) % cfg.n_grid.size();
        const std::size_t rep = idx % reps;
        const std::size_t n = cfg.n_grid[ni];
        const auto inst = build_hard_instance(cfg.k, cfg.j, cfg.eps[e].at(kj, n));
        HardRow& row = rows[idx];
        row.dataset = cfg.eps[e].label();
        row.eps = inst.eps;
        row.n = n;
        row.repeat = static_cast<int>(rep);
        row.seed = hash_combine(hash_combine(hash_combine(cfg.seed, e), n), rep);
        SeededRng rng(cfg.seed, row.seed);
        const auto erm = erm_hard(inst, sample_hard_counts(inst, n, rng));
        row.b_ex = erm.b_ex;
        row.empirical_cost = erm.empirical_cost;
        row.dist_cost = erm.dist_cost;
        row.excess = erm.excess;
    });
    return rows;
}

}  // namespace riskbench
