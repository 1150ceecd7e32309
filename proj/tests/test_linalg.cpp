#include "doctest.h"
#include "oracles.hpp"
#include "riskbench/error.hpp"
#include "riskbench/linalg.hpp"

using namespace riskbench;

namespace {
Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}
}  // namespace

TEST_CASE("orthonormalize keeps an orthonormal pair") {
    std::vector<Vec> vs{vec({1, 0, 0}), vec({0, 1, 0})};
    const OrthoBasis b = orthonormalize(vs);
    CHECK(b.rank() == 2);
    CHECK((b.matrix().col(0) - vs[0]).norm() < 1e-15);
    CHECK((b.matrix().col(1) - vs[1]).norm() < 1e-15);
}

TEST_CASE("orthonormalize drops dependent vectors") {
    std::vector<Vec> vs{vec({1, 0}), vec({2, 0})};
    const OrthoBasis b = orthonormalize(vs);
    CHECK(b.rank() == 1);
    CHECK(std::abs(b.matrix()(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("orthonormalize on random vectors spans the input") {
    SeededRng rng(11);
    std::vector<Vec> vs;
    for (int i = 0; i < 5; ++i) vs.push_back(oracle::random_matrix(rng, 8, 1).col(0));
    const OrthoBasis b = orthonormalize(vs);
    CHECK(b.rank() == 5);
    // residual oracle through the explicit Gram matrix of the basis
    const Mat gram = b.matrix().transpose() * b.matrix();
    CHECK((gram - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    for (const auto& v : vs) CHECK((v - b.matrix() * (b.matrix().transpose() * v)).norm() < 1e-8);
}

TEST_CASE("orthonormalize rejects all-zero input") {
    std::vector<Vec> vs{Vec::Zero(3), Vec::Constant(3, 1e-14)};
    CHECK_THROWS_AS(orthonormalize(vs), Error);
    try {
        orthonormalize(vs);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AllZero);
    }
}

TEST_CASE("orthonormalize stays orthonormal on nearly dependent input") {
    SeededRng rng(3);
    std::vector<Vec> vs;
    Vec base = oracle::random_matrix(rng, 6, 1).col(0);
    for (int i = 0; i < 6; ++i) vs.push_back(base + 1e-7 * oracle::random_matrix(rng, 6, 1).col(0));
    const OrthoBasis b = orthonormalize(vs);
    CHECK(b.orthonormality_error() < 1e-8);
}

TEST_CASE("project_residual examples") {
    OrthoBasis e1 = OrthoBasis::from_orthonormal(vec({1, 0}));
    auto r = project_residual(vec({0, 1}), e1);
    CHECK(r.norm == doctest::Approx(1.0));
    CHECK((r.residual - vec({0, 1})).norm() < 1e-15);

    r = project_residual(vec({0.6, 0.8}), e1);
    CHECK(r.norm == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(std::abs(r.residual(0)) < 1e-15);

    r = project_residual(vec({0.3, 0}), e1);
    CHECK(r.norm < 1e-10);

    CHECK_THROWS_AS(project_residual(vec({1, 0, 0}), e1), Error);
}

TEST_CASE("project_residual is orthogonal and satisfies Pythagoras") {
    SeededRng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.index(9));
        const Eigen::Index j = 1 + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(d)));
        const OrthoBasis b = OrthoBasis::from_orthonormal(oracle::random_orthonormal(rng, d, j));
        const Vec p = oracle::random_in_ball(rng, d);
        const auto r = project_residual(p, b);
        CHECK((b.matrix().transpose() * r.residual).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(p.squaredNorm() - b.project(p).squaredNorm() - r.norm * r.norm) < 1e-9);
    }
}

TEST_CASE("top_j_singular_subspace closed form 2x2") {
    RowMat A(3, 2);
    A << 1, 0, 1, 0, 0, 1;
    const OrthoBasis b = top_j_singular_subspace(A, 1);
    CHECK(std::abs(std::abs(b.matrix()(0, 0)) - 1.0) < 1e-9);
    CHECK(captured_energy(A, b) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("top_j_singular_subspace on a diagonal picks the largest axes") {
    RowMat A = RowMat::Zero(4, 4);
    A.diagonal() << 0.5, -3.0, 1.0, 2.0;
    const OrthoBasis b = top_j_singular_subspace(A, 2);
    CHECK(captured_energy(A, b) == doctest::Approx(13.0).epsilon(1e-10));
    CHECK(std::abs(b.matrix()(1, 0)) + std::abs(b.matrix()(1, 1)) > 0.99);
    CHECK(std::abs(b.matrix()(3, 0)) + std::abs(b.matrix()(3, 1)) > 0.99);
}

TEST_CASE("top_j_singular_subspace matches a Jacobi eigenvalue oracle") {
    SeededRng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const RowMat A = oracle::random_matrix(rng, 6, 4);
        const auto ev = oracle::jacobi_eigenvalues(A.transpose() * A);
        const double expected = ev[0] + ev[1];
        const OrthoBasis b = top_j_singular_subspace(A, 2);
        CHECK(b.orthonormality_error() < 1e-8);
        CHECK(std::abs(captured_energy(A, b) - expected) <= 1e-6 * expected);
    }
}

TEST_CASE("top_j_singular_subspace energy is invariant under row permutation") {
    SeededRng rng(23);
    const RowMat A = oracle::random_matrix(rng, 12, 5);
    RowMat B = A;
    for (Eigen::Index i = 0; i < A.rows(); ++i) B.row(i) = A.row(A.rows() - 1 - i);
    const double ea = captured_energy(A, top_j_singular_subspace(A, 3));
    const double eb = captured_energy(B, top_j_singular_subspace(B, 3));
    CHECK(std::abs(ea - eb) <= 1e-6 * ea);
}

TEST_CASE("top_j_singular_subspace handles rank-deficient input") {
    RowMat A(3, 3);
    A << 1, 0, 0, 2, 0, 0, -1, 0, 0;
    const OrthoBasis b = top_j_singular_subspace(A, 3);
    CHECK(b.rank() == 3);
    CHECK(b.orthonormality_error() < 1e-8);
    CHECK(captured_energy(A, b) == doctest::Approx(6.0));
}

TEST_CASE("top_j_singular_subspace rejects j > min(n, d)") {
    RowMat A(2, 3);
    A.setOnes();
    CHECK_THROWS_AS(top_j_singular_subspace(A, 3), Error);
}

TEST_CASE("top_j_singular_subspace reports non-convergence") {
    SeededRng rng(2);
    const RowMat A = oracle::random_matrix(rng, 10, 6);
    PowerIterationOptions opts;
    opts.max_iter = 1;
    opts.tol = 1e-15;
    try {
        top_j_singular_subspace(A, 3, opts);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
    }
}

TEST_CASE("decomposition with identity and zero projectors") {
    SeededRng rng(9);
    const Vec p = oracle::random_in_ball(rng, 5);
    const OrthoBasis U = OrthoBasis::from_orthonormal(oracle::random_orthonormal(rng, 5, 2));
    const double direct = (p - U.project(p)).squaredNorm();

    const auto ti = decomposition_terms(p, U, Projector::identity(5));
    CHECK(std::abs(ti.t3) < 1e-15);
    CHECK(std::abs(ti.t4) < 1e-15);
    CHECK(std::abs(ti.t5) < 1e-15);
    CHECK(std::abs(ti.t1 - ti.t2 - direct) < 1e-12);

    const auto tz = decomposition_terms(p, U, Projector::zero(5));
    CHECK(tz.t1 == 0.0);
    CHECK(tz.t2 == 0.0);
    CHECK(tz.t5 == 0.0);
    CHECK(std::abs(tz.t3 - tz.t4 - direct) < 1e-12);
}

TEST_CASE("decomposition identity on random triples") {
    SeededRng rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index j = 1 + static_cast<Eigen::Index>(rng.index(3));
        const Eigen::Index r = static_cast<Eigen::Index>(rng.index(11));
        const Vec p = oracle::random_in_ball(rng, 10);
        const OrthoBasis U = OrthoBasis::from_orthonormal(oracle::random_orthonormal(rng, 10, j));
        const Projector pi(r == 0 ? OrthoBasis(10) : OrthoBasis::from_orthonormal(oracle::random_orthonormal(rng, 10, r)));
        // direct oracle through the materialised projector
        const Mat I = Mat::Identity(10, 10);
        const double direct = ((I - U.matrix() * U.matrix().transpose()) * p).squaredNorm();
        worst = std::max(worst, std::abs(decomposition_terms(p, U, pi).sum() - direct));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("decomposition rejects mismatched dimensions") {
    const OrthoBasis U = OrthoBasis::from_orthonormal(Mat::Identity(3, 1));
    CHECK_THROWS_AS(decomposition_terms(Vec::Zero(4), U, Projector::zero(3)), Error);
}

TEST_CASE("materialised projector is idempotent") {
    SeededRng rng(4);
    const Projector pi(OrthoBasis::from_orthonormal(oracle::random_orthonormal(rng, 7, 3)));
    const Mat m = pi.materialize();
    CHECK((m * m - m).cwiseAbs().maxCoeff() < 1e-8);
}
