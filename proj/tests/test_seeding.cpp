#include "doctest.h"
#include "oracles.hpp"
#include "riskbench/error.hpp"
#include "riskbench/seeding.hpp"

using namespace riskbench;

namespace {

PointSet line_points(std::initializer_list<double> xs) {
    RowMat m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return PointSet(m);
}

PointSet two_lines(SeededRng& rng) {
    // 10 points on each of two orthogonal lines through the origin in R^3
    RowMat m(20, 3);
    const Vec a = Vec::Unit(3, 0);
    const Vec b = (Vec(3) << 0.0, 0.6, 0.8).finished();
    for (int i = 0; i < 10; ++i) {
        m.row(i) = (2.0 * rng.uniform() - 1.0) * a.transpose();
        m.row(10 + i) = (2.0 * rng.uniform() - 1.0) * b.transpose();
    }
    return PointSet(m);
}

}  // namespace

TEST_CASE("dz_seed with k = 1 is uniform") {
    const PointSet P = line_points({0.1, 0.2, 0.3, 0.4, 0.5});
    std::vector<int> counts(5, 0);
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        SeededRng rng(1, static_cast<std::uint64_t>(t));
        const auto S = dz_seed(P, 1, 2, rng);
        counts[static_cast<std::size_t>(std::lround(S.centers(0, 0) * 10.0) - 1)]++;
    }
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - draws / 5.0) * (c - draws / 5.0) / (draws / 5.0);
    CHECK(chi2 < 13.277);  // chi-square, 4 dof, p = 0.01
}

TEST_CASE("dz_seed puts all mass on the only positive-distance point") {
    const PointSet P = line_points({0.0, 1.0});
    int conditioned = 0;
    for (int t = 0; t < 200; ++t) {
        SeededRng rng(2, static_cast<std::uint64_t>(t));
        const auto S = dz_seed(P, 2, 2, rng);
        if (S.centers(0, 0) != 0.0) continue;
        ++conditioned;
        CHECK(S.centers(1, 0) == 1.0);
    }
    CHECK(conditioned > 50);
}

TEST_CASE("dz_seed second-center law matches the D^z formula") {
    // P = {0, 1, 2}, z = 1, first center 0: law (0, 1/3, 2/3)
    const PointSet P = line_points({0.0, 1.0, 2.0});
    std::vector<int> counts(3, 0);
    int total = 0;
    for (std::uint64_t t = 0; total < 10000; ++t) {
        SeededRng rng(3, t);
        const auto S = dz_seed(P, 2, 1, rng);
        if (S.centers(0, 0) != 0.0) continue;
        ++total;
        counts[static_cast<std::size_t>(S.centers(1, 0))]++;
    }
    CHECK(counts[0] == 0);
    const double e1 = total / 3.0, e2 = 2.0 * total / 3.0;
    const double chi2 = (counts[1] - e1) * (counts[1] - e1) / e1 + (counts[2] - e2) * (counts[2] - e2) / e2;
    CHECK(chi2 < 6.635);  // chi-square, 1 dof, p = 0.01
}

TEST_CASE("dz_seed handles fewer distinct points than k") {
    const PointSet P = line_points({0.5, 0.5, -0.5, 0.5});
    SeededRng rng(4);
    const auto S = dz_seed(P, 4, 2, rng);
    CHECK(S.k() == 4);
    for (Eigen::Index c = 0; c < 4; ++c) CHECK(std::abs(std::abs(S.centers(c, 0)) - 0.5) < 1e-15);
    // both distinct values must be present before duplicates
    CHECK(S.centers(0, 0) != S.centers(1, 0));
}

TEST_CASE("dz_seed is reproducible and validates input") {
    SeededRng g(5);
    RowMat m = oracle::random_matrix(g, 50, 4);
    const PointSet P(m);
    SeededRng a(77, 3), b(77, 3);
    CHECK(dz_seed(P, 6, 3, a).centers == dz_seed(P, 6, 3, b).centers);
    SeededRng c(1);
    CHECK_THROWS_AS(dz_seed(PointSet(RowMat(0, 2)), 1, 2, c), Error);
    CHECK_THROWS_AS(dz_seed(P, 51, 2, c), Error);
}

TEST_CASE("adaptive_subspace_seed recovers two planted lines") {
    SeededRng data_rng(6);
    const PointSet P = two_lines(data_rng);
    int exact = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        SeededRng rng(8, t);
        const auto U = adaptive_subspace_seed(P, 2, 1, rng);
        for (const auto& b : U.bases) CHECK(b.orthonormality_error() < 1e-8);
        if (subspace_cost(P, U).total < 1e-20) ++exact;
    }
    CHECK(exact >= 95);
}

TEST_CASE("adaptive_subspace_seed stops when residual mass is exhausted") {
    RowMat m(4, 3);
    for (int i = 0; i < 4; ++i) m.row(i) = Vec::Unit(3, 0).transpose();
    SeededRng rng(9);
    const auto U = adaptive_subspace_seed(PointSet(m), 1, 2, rng);
    REQUIRE(U.bases.size() == 1);
    CHECK(U.bases[0].rank() == 1);
    CHECK(std::abs(std::abs(U.bases[0].matrix()(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("adaptive_subspace_seed on the standard basis gives the full space") {
    SeededRng rng(10);
    const auto U = adaptive_subspace_seed(PointSet(RowMat::Identity(3, 3)), 1, 3, rng);
    CHECK(U.bases[0].rank() == 3);
    CHECK(subspace_cost(PointSet(RowMat::Identity(3, 3)), U).total < 1e-20);
}

TEST_CASE("adaptive_subspace_seed errors and reproducibility") {
    SeededRng rng(11);
    try {
        adaptive_subspace_seed(PointSet(RowMat::Zero(5, 3)), 1, 1, rng);
        FAIL("expected AllZero");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AllZero);
    }
    CHECK_THROWS_AS(adaptive_subspace_seed(PointSet(RowMat(0, 3)), 1, 1, rng), Error);

    SeededRng g(12);
    const PointSet P(oracle::random_matrix(g, 40, 5));
    SeededRng a(5, 1), b(5, 1);
    const auto Ua = adaptive_subspace_seed(P, 3, 2, a);
    const auto Ub = adaptive_subspace_seed(P, 3, 2, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(Ua.bases[i].matrix() == Ub.bases[i].matrix());
}
