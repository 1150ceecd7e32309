#ifndef RISKBENCH_OBJECTIVES_HPP
#define RISKBENCH_OBJECTIVES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "riskbench/linalg.hpp"

namespace riskbench {

/// n points in R^d, one per row.
struct PointSet {
    RowMat points;
    std::string name;

    PointSet() = default;
    PointSet(RowMat pts, std::string nm = {}) : points(std::move(pts)), name(std::move(nm)) {}

    Eigen::Index n() const { return points.rows(); }
    Eigen::Index d() const { return points.cols(); }
    auto row(Eigen::Index i) const { return points.row(i); }

    double max_norm() const;
    bool in_unit_ball(double slack = 1e-9) const { return max_norm() <= 1.0 + slack; }
    PointSet subset(const std::vector<std::size_t>& indices) const;
};

struct CenterSolution {
    RowMat centers;  // k x d
    int z = 2;

    Eigen::Index k() const { return centers.rows(); }
    Eigen::Index d() const { return centers.cols(); }
    /// Radially clamps every center to norm at most 1.
    void clamp_to_unit_ball();
};

struct SubspaceSolution {
    std::vector<OrthoBasis> bases;
    Eigen::Index j = 1;
    int z = 2;

    Eigen::Index k() const { return static_cast<Eigen::Index>(bases.size()); }
};

struct CostVector {
    std::vector<double> values;
    std::vector<int> labels;

    std::size_t size() const { return values.size(); }
    double l1() const;
};

struct CostResult {
    CostVector vec;
    double total = 0.0;
};

/// r^z computed from r^2. Shared by every cost routine so totals agree bitwise.
inline double power_from_squared(double sq, int z) {
    if (z == 2) return sq;
    const double r = std::sqrt(sq);
    if (z == 1) return r;
    return std::pow(r, z);
}

/// ||a - b||^2 accumulated coordinate by coordinate in index order.
template <typename A, typename B>
double squared_distance(const A& a, const B& b) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double diff = a(i) - b(i);
        acc += diff * diff;
    }
    return acc;
}

/// Neumaier-compensated running sum, accumulated in call order.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// v_p = min_s ||p - s||^z, labels = argmin (lowest index on ties).
CostResult center_cost(const PointSet& P, const CenterSolution& S);
/// v_p = min_U ||(I - UU^T)p||^z, labels = argmin (lowest index on ties).
CostResult subspace_cost(const PointSet& P, const SubspaceSolution& U);

/// Squared residual of x against a basis, ||x||^2 - ||B^T x||^2 clamped at 0.
double squared_residual(const Eigen::Ref<const Vec>& x, const OrthoBasis& basis);

/// One checked inequality.
struct BoundCheck {
    std::string name;
    bool hypothesis_holds = true;  // false: the implication was not applicable
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = true;
    double slack() const { return rhs - lhs; }
};

struct BoundReport {
    std::vector<BoundCheck> checks;
    bool all_satisfied() const;
};

/// Checks the power triangle inequalities on the collinear witness {0, a, b}
/// (so d(0,a) = a, d(0,b) = b, d(a,b) = |a - b|), and the implications
///   a^2 = b^2 +- eps*b                            => |a-b| <= eps, |a^z-b^z| <= 2(3z)^z eps
///   a^2 = b^2 +- max(eps*b, eps^2)/(4(3z)^z)      => |a^z-b^z| <= eps
/// when their hypotheses hold. Throws DomainError if a, b are outside [0, 2].
BoundReport power_bound_check(double a, double b, int z, double eps);

/// Both power triangle inequalities for an arbitrary triple of distances
/// d_ab, d_ac, d_bc in a metric space.
BoundReport triangle_power_check(double d_ab, double d_ac, double d_bc, int z, double eps);

}  // namespace riskbench

#endif  // RISKBENCH_OBJECTIVES_HPP
