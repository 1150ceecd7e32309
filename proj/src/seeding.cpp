#include "riskbench/seeding.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "riskbench/error.hpp"

namespace riskbench {

CenterSolution dz_seed(const PointSet& P, int k, int z, SeededRng& rng) {
    if (P.n() == 0) throw Error(ErrorKind::EmptyInput, "cannot seed from an empty point set");
    if (k < 1 || k > P.n()) throw Error(ErrorKind::DomainError, "k must lie in [1, n]");
    if (z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");

    const auto n = static_cast<std::size_t>(P.n());
    CenterSolution S;
    S.z = z;
    S.centers.resize(k, P.d());

    std::size_t first = rng.index(n);
    S.centers.row(0) = P.points.row(static_cast<Eigen::Index>(first));

    std::vector<double> min_sq(n);
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        min_sq[i] = (P.points.row(static_cast<Eigen::Index>(i)) - S.centers.row(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) weights[i] = power_from_squared(min_sq[i], z);
        std::size_t pick = rng.weighted_index(weights);
        if (pick == n) pick = rng.index(n);  // every point already coincides with a center
        S.centers.row(c) = P.points.row(static_cast<Eigen::Index>(pick));
        for (std::size_t i = 0; i < n; ++i) {
            const double sq = (P.points.row(static_cast<Eigen::Index>(i)) - S.centers.row(c)).squaredNorm();
            min_sq[i] = std::min(min_sq[i], sq);
        }
    }
    return S;
}

SubspaceSolution adaptive_subspace_seed(const PointSet& P, int k, int j, SeededRng& rng, int z) {
    if (P.n() == 0) throw Error(ErrorKind::EmptyInput, "cannot seed from an empty point set");
    if (k < 1) throw Error(ErrorKind::DomainError, "k must be >= 1");
    if (j < 1 || j > P.d()) throw Error(ErrorKind::DomainError, "j must lie in [1, d]");

    const auto n = static_cast<std::size_t>(P.n());
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < n; ++i) {
        if (P.points.row(static_cast<Eigen::Index>(i)).norm() >= kAllZeroThreshold) nonzero.push_back(i);
    }
    if (nonzero.empty()) throw Error(ErrorKind::AllZero, "every point is the origin");

    SubspaceSolution U;
    U.j = j;
    U.z = z;
    // squared residual against all completed subspaces
    std::vector<double> done_sq(n, std::numeric_limits<double>::infinity());
    std::vector<double> weights(n);
    Vec p(P.d());

    for (int s = 0; s < k; ++s) {
        OrthoBasis basis(P.d());
        for (int round = 0; round < j; ++round) {
            for (std::size_t i = 0; i < n; ++i) {
                p = P.points.row(static_cast<Eigen::Index>(i)).transpose();
                const double own = (p - basis.project(p)).squaredNorm();
                weights[i] = std::min(own, done_sq[i]);
            }
            std::size_t pick = rng.weighted_index(weights);
            if (pick == n) {
                if (round > 0) break;
                pick = nonzero[rng.index(nonzero.size())];
            }
            p = P.points.row(static_cast<Eigen::Index>(pick)).transpose();
            Vec r = orthogonal_residual(basis, p);
            const double norm = r.norm();
            if (norm < kDropThreshold) break;
            basis.append_unit(r / norm);
        }
        for (std::size_t i = 0; i < n; ++i) {
            p = P.points.row(static_cast<Eigen::Index>(i)).transpose();
            done_sq[i] = std::min(done_sq[i], (p - basis.project(p)).squaredNorm());
        }
        U.bases.push_back(std::move(basis));
    }
    return U;
}

}  // namespace riskbench
