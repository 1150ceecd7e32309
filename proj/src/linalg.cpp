#include "riskbench/linalg.hpp"

#include <cmath>
#include <string>

#include "riskbench/error.hpp"
#include "riskbench/rng.hpp"

namespace riskbench {

OrthoBasis OrthoBasis::from_orthonormal(Mat cols) {
    OrthoBasis b(cols.rows());
    b.cols_ = std::move(cols);
    if (b.orthonormality_error() > 1e-8) {
        throw Error(ErrorKind::DomainError, "columns are not orthonormal");
    }
    return b;
}

double OrthoBasis::orthonormality_error() const {
    if (rank() == 0) return 0.0;
    const Mat gram = cols_.transpose() * cols_;
    return (gram - Mat::Identity(rank(), rank())).cwiseAbs().maxCoeff();
}

void OrthoBasis::append_unit(const Vec& q) {
    if (q.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "appended vector has wrong dimension");
    cols_.conservativeResize(Eigen::NoChange, cols_.cols() + 1);
    cols_.col(cols_.cols() - 1) = q;
}

Projector Projector::identity(Eigen::Index dim) {
    return Projector(OrthoBasis::from_orthonormal(Mat::Identity(dim, dim)));
}

Vec orthogonal_residual(const OrthoBasis& basis, Vec v) {
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < basis.rank(); ++c) {
            v -= basis.col(c).dot(v) * basis.col(c);
        }
    }
    return v;
}

OrthoBasis orthonormalize(std::span<const Vec> vectors) {
    if (vectors.empty()) throw Error(ErrorKind::AllZero, "no vectors to orthonormalize");
    const Eigen::Index d = vectors.front().size();
    bool any_nonzero = false;
    for (const auto& v : vectors) {
        if (v.size() != d) throw Error(ErrorKind::DimensionMismatch, "vectors of mixed dimension");
        if (!v.allFinite()) throw Error(ErrorKind::DomainError, "non-finite vector entry");
        if (v.norm() >= kAllZeroThreshold) any_nonzero = true;
    }
    if (!any_nonzero) throw Error(ErrorKind::AllZero, "every input vector is numerically zero");

    OrthoBasis basis(d);
    for (const auto& v : vectors) {
        if (basis.rank() == d) break;
        Vec r = orthogonal_residual(basis, v);
        const double norm = r.norm();
        if (norm < kDropThreshold) continue;
        basis.append_unit(r / norm);
    }
    return basis;
}

OrthoBasis orthonormalize(const Mat& columns) {
    std::vector<Vec> vs;
    vs.reserve(static_cast<std::size_t>(columns.cols()));
    for (Eigen::Index c = 0; c < columns.cols(); ++c) vs.emplace_back(columns.col(c));
    return orthonormalize(std::span<const Vec>(vs));
}

Residual project_residual(const Eigen::Ref<const Vec>& p, const OrthoBasis& basis) {
    if (p.size() != basis.dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "point has dimension " + std::to_string(p.size()) + ", basis " +
                        std::to_string(basis.dim()));
    }
    Vec r = p - basis.project(p);
    const double norm = r.norm();
    return {std::move(r), norm};
}

OrthoBasis top_j_eigenspace(Mat gram, Eigen::Index j, const PowerIterationOptions& opts) {
    const Eigen::Index d = gram.rows();
    if (j < 0 || j > d) throw Error(ErrorKind::DomainError, "j must lie in [0, d]");
    OrthoBasis basis(d);
    SeededRng rng(opts.seed, 0x706f776572ULL);
    // eigenvalues below this are roundoff relative to the whole spectrum
    const double scale = std::max(gram.trace(), 0.0);
    const double floor = 1e-14 * scale;

    for (Eigen::Index i = 0; i < j; ++i) {
        Vec v(d);
        double vn = 0.0;
        for (int attempt = 0; attempt < 100 && vn < 1e-8; ++attempt) {
            for (Eigen::Index c = 0; c < d; ++c) v(c) = rng.gaussian();
            v = orthogonal_residual(basis, v);
            vn = v.norm();
        }
        v /= vn;
        double lambda = v.dot(gram * v);
        bool converged = false;
        int iter = 0;
        for (; iter < opts.max_iter; ++iter) {
            Vec w = orthogonal_residual(basis, gram * v);
            const double wn = w.norm();
            if (wn <= floor || wn == 0.0) {
                // remaining spectrum is (numerically) zero: any orthogonal direction is optimal
                lambda = 0.0;
                converged = true;
                break;
            }
            v = w / wn;
            const double next = v.dot(gram * v);
            const double change = std::abs(next - lambda);
            lambda = next;
            if (change <= opts.tol * std::max(std::abs(lambda), floor)) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw Error(ErrorKind::NoConvergence,
                        "power iteration did not converge after " + std::to_string(iter) + " iterations");
        }
        gram.noalias() -= lambda * v * v.transpose();
        basis.append_unit(v);
    }
    return basis;
}

OrthoBasis top_j_singular_subspace(const Eigen::Ref<const RowMat>& A, Eigen::Index j,
                                   const PowerIterationOptions& opts) {
    if (j > std::min(A.rows(), A.cols())) {
        throw Error(ErrorKind::DomainError, "j exceeds min(n, d)");
    }
    if (!A.allFinite()) throw Error(ErrorKind::DomainError, "matrix has non-finite entries");
    Mat gram = A.transpose() * A;
    return top_j_eigenspace(std::move(gram), j, opts);
}

double captured_energy(const Eigen::Ref<const RowMat>& A, const OrthoBasis& basis) {
    if (A.cols() != basis.dim()) throw Error(ErrorKind::DimensionMismatch, "energy: dimension mismatch");
    if (basis.rank() == 0) return 0.0;
    return (A * basis.matrix()).squaredNorm();
}

DecompositionTerms decomposition_terms(const Eigen::Ref<const Vec>& p, const OrthoBasis& U,
                                       const Projector& pi) {
    if (p.size() != U.dim() || p.size() != pi.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "decomposition: incompatible dimensions");
    }
    const Vec pi_p = pi.apply(p);
    const Vec rest = p - pi_p;
    const Vec ut_rest = U.coefficients(rest);
    DecompositionTerms t{};
    t.t1 = pi_p.squaredNorm();
    t.t2 = U.coefficients(pi_p).squaredNorm();
    t.t3 = rest.squaredNorm();
    t.t4 = ut_rest.squaredNorm();  // ||UU^T x|| = ||U^T x|| for orthonormal U
    t.t5 = 2.0 * U.coefficients(pi_p).dot(ut_rest);
    return t;
}

}  // namespace riskbench
