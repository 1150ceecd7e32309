#include "riskbench/objectives.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "riskbench/error.hpp"

namespace riskbench {

double PointSet::max_norm() const {
    if (n() == 0) return 0.0;
    return points.rowwise().norm().maxCoeff();
}

PointSet PointSet::subset(const std::vector<std::size_t>& indices) const {
    RowMat out(static_cast<Eigen::Index>(indices.size()), d());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(indices[i]));
    }
    return PointSet(std::move(out), name);
}

void CenterSolution::clamp_to_unit_ball() {
    for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        const double norm = centers.row(i).norm();
        if (norm > 1.0) centers.row(i) /= norm;
    }
}

double CostVector::l1() const {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

CostResult center_cost(const PointSet& P, const CenterSolution& S) {
    if (S.k() < 1) throw Error(ErrorKind::DomainError, "center solution has no centers");
    if (S.d() != P.d()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "points have dimension " + std::to_string(P.d()) + ", centers " + std::to_string(S.d()));
    }
    if (S.z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");
    CostResult out;
    const auto n = static_cast<std::size_t>(P.n());
    out.vec.values.resize(n);
    out.vec.labels.resize(n);
    CompensatedSum total;
    for (Eigen::Index i = 0; i < P.n(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (Eigen::Index c = 0; c < S.k(); ++c) {
            const double sq = squared_distance(P.points.row(i), S.centers.row(c));
            if (sq < best) {
                best = sq;
                best_idx = static_cast<int>(c);
            }
        }
        const double v = power_from_squared(best, S.z);
        out.vec.values[static_cast<std::size_t>(i)] = v;
        out.vec.labels[static_cast<std::size_t>(i)] = best_idx;
        total.add(v);
    }
    out.total = total.value();
    return out;
}

double squared_residual(const Eigen::Ref<const Vec>& x, const OrthoBasis& basis) {
    if (basis.rank() == 0) return x.squaredNorm();
    const double r = x.squaredNorm() - basis.coefficients(x).squaredNorm();
    return r > 0.0 ? r : 0.0;
}

CostResult subspace_cost(const PointSet& P, const SubspaceSolution& U) {
    if (U.k() < 1) throw Error(ErrorKind::DomainError, "subspace solution has no bases");
    for (const auto& b : U.bases) {
        if (b.dim() != P.d()) {
            throw Error(ErrorKind::DimensionMismatch,
                        "points have dimension " + std::to_string(P.d()) + ", basis " + std::to_string(b.dim()));
        }
    }
    if (U.z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");
    CostResult out;
    const auto n = static_cast<std::size_t>(P.n());
    out.vec.values.resize(n);
    out.vec.labels.resize(n);
    CompensatedSum total;
    Vec p(P.d());
    for (Eigen::Index i = 0; i < P.n(); ++i) {
        p = P.points.row(i).transpose();
        double best = std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (Eigen::Index c = 0; c < U.k(); ++c) {
            const Vec r = p - U.bases[static_cast<std::size_t>(c)].project(p);
            const double sq = r.squaredNorm();
            if (sq < best) {
                best = sq;
                best_idx = static_cast<int>(c);
            }
        }
        const double v = power_from_squared(best, U.z);
        out.vec.values[static_cast<std::size_t>(i)] = v;
        out.vec.labels[static_cast<std::size_t>(i)] = best_idx;
        total.add(v);
    }
    out.total = total.value();
    return out;
}

bool BoundReport::all_satisfied() const {
    for (const auto& c : checks) {
        if (c.hypothesis_holds && !c.satisfied) return false;
    }
    return true;
}

namespace {

BoundCheck make_check(std::string name, bool hypothesis, double lhs, double rhs) {
    BoundCheck c;
    c.name = std::move(name);
    c.hypothesis_holds = hypothesis;
    c.lhs = lhs;
    c.rhs = rhs;
    // relative roundoff allowance: both sides are sums of O(1) powers
    c.satisfied = !hypothesis || lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
    return c;
}

}  // namespace

BoundReport triangle_power_check(double d_ab, double d_ac, double d_bc, int z, double eps) {
    if (z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");
    if (!(eps > 0.0)) throw Error(ErrorKind::DomainError, "eps must be positive");
    if (d_ab < 0 || d_ac < 0 || d_bc < 0) throw Error(ErrorKind::DomainError, "negative distance");
    const double zm1 = z - 1;
    const double ab = std::pow(d_ab, z);
    const double ac = std::pow(d_ac, z);
    const double bc = std::pow(d_bc, z);
    BoundReport report;
    report.checks.push_back(make_check(
        "triangle_power", true, ab,
        std::pow(1.0 + eps, zm1) * ac + std::pow((1.0 + eps) / eps, zm1) * bc));
    report.checks.push_back(make_check(
        "triangle_power_difference", true, std::abs(ab - ac),
        eps * ac + std::pow((2.0 * z + eps) / eps, zm1) * bc));
    return report;
}

BoundReport power_bound_check(double a, double b, int z, double eps) {
    if (!(a >= 0.0 && a <= 2.0 && b >= 0.0 && b <= 2.0)) {
        throw Error(ErrorKind::DomainError, "a and b must lie in [0, 2]");
    }
    // witness points 0, a, b on the real line: d(0,a) = a, d(0,b) = b, d(a,b) = |a-b|
    BoundReport report = triangle_power_check(a, b, std::abs(a - b), z, eps);

    const double gap_sq = std::abs(a * a - b * b);
    const double diff_z = std::abs(std::pow(a, z) - std::pow(b, z));
    const double three_z_pow = std::pow(3.0 * z, z);

    const bool gap_hyp = gap_sq <= eps * b;
    report.checks.push_back(make_check("cost_bound_linear", gap_hyp, std::abs(a - b), eps));
    report.checks.push_back(make_check("cost_bound_power", gap_hyp, diff_z, 2.0 * three_z_pow * eps));

    const bool cor_hyp = gap_sq <= std::max(eps * b, eps * eps) / (4.0 * three_z_pow);
    report.checks.push_back(make_check("cost_bound_rescaled", cor_hyp, diff_z, eps));
    return report;
}

}  // namespace riskbench
