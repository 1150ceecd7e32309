#ifndef RISKBENCH_LINALG_HPP
#define RISKBENCH_LINALG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace riskbench {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
/// Row-major n x d storage: one point per row.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kDropThreshold = 1e-10;
constexpr double kAllZeroThreshold = 1e-12;

/// d x j matrix with orthonormal columns (U in ||(I - UU^T)p||).
/// A rank-0 basis is allowed and represents the zero subspace of R^d.
class OrthoBasis {
public:
    explicit OrthoBasis(Eigen::Index dim = 0) : cols_(dim, 0) {}

    /// Wraps columns that are already orthonormal. Checked to 1e-8.
    static OrthoBasis from_orthonormal(Mat cols);

    Eigen::Index dim() const { return cols_.rows(); }
    Eigen::Index rank() const { return cols_.cols(); }
    const Mat& matrix() const { return cols_; }
    auto col(Eigen::Index i) const { return cols_.col(i); }

    /// B^T x
    Vec coefficients(const Eigen::Ref<const Vec>& x) const { return cols_.transpose() * x; }
    /// BB^T x
    Vec project(const Eigen::Ref<const Vec>& x) const { return cols_ * (cols_.transpose() * x); }

    /// max |B^T B - I|
    double orthonormality_error() const;

    /// Appends a unit vector assumed orthogonal to the current columns.
    void append_unit(const Vec& q);

private:
    Mat cols_;
};

/// Orthogonal projection onto span(basis), Pi = BB^T, stored by its basis.
class Projector {
public:
    explicit Projector(OrthoBasis basis) : basis_(std::move(basis)) {}
    static Projector identity(Eigen::Index dim);
    static Projector zero(Eigen::Index dim) { return Projector(OrthoBasis(dim)); }

    const OrthoBasis& basis() const { return basis_; }
    Eigen::Index dim() const { return basis_.dim(); }
    Eigen::Index rank() const { return basis_.rank(); }
    Vec apply(const Eigen::Ref<const Vec>& x) const { return basis_.project(x); }
    Mat materialize() const { return basis_.matrix() * basis_.matrix().transpose(); }

private:
    OrthoBasis basis_;
};

/// Modified Gram-Schmidt with one re-orthogonalisation pass. Vectors whose
/// residual falls below kDropThreshold are dropped.
/// Throws AllZero when every input has norm below kAllZeroThreshold.
OrthoBasis orthonormalize(std::span<const Vec> vectors);
OrthoBasis orthonormalize(const Mat& columns);

/// Removes the components of v along the basis (two MGS passes); returns the residual.
Vec orthogonal_residual(const OrthoBasis& basis, Vec v);

struct Residual {
    Vec residual;
    double norm;
};

/// residual = p - BB^T p. Throws DimensionMismatch.
Residual project_residual(const Eigen::Ref<const Vec>& p, const OrthoBasis& basis);

struct PowerIterationOptions {
    double tol = 1e-10;
    int max_iter = 10'000;
    std::uint64_t seed = 0x5eed;
};

/// Top-j right singular subspace of A (uncentred), found by power iteration
/// with deflation on the Gram matrix A^T A. Throws NoConvergence when the
/// Rayleigh quotient still changes by more than tol (relative) after max_iter.
OrthoBasis top_j_singular_subspace(const Eigen::Ref<const RowMat>& A, Eigen::Index j,
                                   const PowerIterationOptions& opts = {});
/// Same, starting from a precomputed d x d Gram matrix.
OrthoBasis top_j_eigenspace(Mat gram, Eigen::Index j, const PowerIterationOptions& opts = {});

/// ||A U||_F^2, the energy captured by a basis.
double captured_energy(const Eigen::Ref<const RowMat>& A, const OrthoBasis& basis);

/// The five terms t1 = ||Pi p||^2, t2 = ||U^T Pi p||^2, t3 = ||(I-Pi)p||^2,
/// t4 = ||UU^T(I-Pi)p||^2 and t5 = 2 p^T Pi UU^T (I-Pi) p.
///
/// Expanding ||U^T p||^2 with p = Pi p + (I-Pi)p gives the cross term with a
/// positive sign, so the residual enters with a minus:
///   ||(I-UU^T)p||^2 = t1 - t2 + t3 - t4 - t5.
struct DecompositionTerms {
    double t1, t2, t3, t4, t5;
    double sum() const { return t1 - t2 + t3 - t4 - t5; }
};

DecompositionTerms decomposition_terms(const Eigen::Ref<const Vec>& p, const OrthoBasis& U,
                                       const Projector& pi);

}  // namespace riskbench

#endif  // RISKBENCH_LINALG_HPP
