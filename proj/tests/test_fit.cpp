#include "doctest.h"
#include "riskbench/error.hpp"
#include "riskbench/fit.hpp"
#include "riskbench/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace riskbench;

namespace {

std::vector<FitRow> planted(double c, double q1, double q2) {
    std::vector<FitRow> rows;
    for (double k : {10.0, 20.0, 30.0, 50.0})
        for (int e = 6; e <= 12; ++e) {
            const double n = std::ldexp(1.0, e);
            rows.push_back({k, n, c * std::pow(k, q1) / std::pow(n, q2)});
        }
    return rows;
}

double lse_at(const std::vector<FitRow>& rows, double c, double q1, double q2) {
    double s = 0.0;
    for (const auto& r : rows) {
        const double e = r.y - c * std::pow(r.k, q1) / std::pow(r.n, q2);
        s += e * e;
    }
    return s;
}

}  // namespace

TEST_CASE("fit recovers planted parameters") {
    const auto rows = planted(0.03, 0.44, 0.54);
    const auto f = fit_power_law(rows);
    CHECK(std::abs(f.c - 0.03) <= 1e-2);
    CHECK(std::abs(f.q1 - 0.44) <= 1e-2);
    CHECK(std::abs(f.q2 - 0.54) <= 1e-2);
    CHECK(f.lse <= f.initial_lse);
    CHECK(f.lse == doctest::Approx(lse_at(rows, f.c, f.q1, f.q2)).epsilon(1e-9));
    CHECK(f.rows == rows.size());
}

TEST_CASE("fit recovers other planted exponents") {
    for (auto [c, q1, q2] : {std::tuple{0.1, 0.5, 0.5}, std::tuple{0.005, 0.3, 0.7}, std::tuple{1.0, 0.0, 0.5}}) {
        const auto f = fit_power_law(planted(c, q1, q2));
        CHECK(std::abs(f.c - c) / c <= 1e-2);
        CHECK(std::abs(f.q1 - q1) <= 1e-2);
        CHECK(std::abs(f.q2 - q2) <= 1e-2);
    }
}

TEST_CASE("fit of 1/sqrt(n) with two equal k columns") {
    std::vector<FitRow> rows;
    for (double k : {2.0, 3.0})
        for (int e = 6; e <= 14; ++e) {
            const double n = std::ldexp(1.0, e);
            rows.push_back({k, n, 1.0 / std::sqrt(n)});
        }
    const auto f = fit_power_law(rows);
    CHECK(std::abs(f.q2 - 0.5) <= 1e-2);
    CHECK(std::abs(f.q1) <= 2e-2);
}

TEST_CASE("fit rejects unidentifiable inputs") {
    const std::vector<FitRow> same{{10, 64, 0.1}, {10, 64, 0.1}, {10, 64, 0.1}};
    try {
        fit_power_law(same);
        FAIL("expected Underdetermined");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Underdetermined);
    }
    CHECK_THROWS_AS(fit_power_law({{10, 64, 0.1}, {20, 128, 0.1}}), Error);
    // one k: only identifiable once q1 is fixed
    std::vector<FitRow> one_k;
    for (int e = 6; e <= 10; ++e) one_k.push_back({2, std::ldexp(1.0, e), 0.2 * std::pow(2.0, -0.5 * e)});
    CHECK_THROWS_AS(fit_power_law(one_k), Error);
    FitOptions opts;
    opts.fix_q1 = 0.0;
    const auto f = fit_power_law(one_k, opts);
    CHECK(f.q1 == 0.0);
    CHECK(std::abs(f.q2 - 0.5) <= 1e-2);
    CHECK(std::abs(f.c - 0.2) <= 1e-2);
}

TEST_CASE("fit is scale equivariant and order free") {
    SeededRng rng(1);
    auto rows = planted(0.05, 0.45, 0.5);
    for (auto& r : rows) r.y *= 1.0 + 0.2 * (rng.uniform() - 0.5);
    rows.push_back({20, 256, -0.0005});  // negative rows participate
    const auto base = fit_power_law(rows);
    CHECK(base.lse <= base.initial_lse);

    auto scaled = rows;
    for (auto& r : scaled) r.y *= 7.0;
    const auto s = fit_power_law(scaled);
    CHECK(std::abs(s.c / (7.0 * base.c) - 1.0) <= 1e-3);
    CHECK(std::abs(s.q1 - base.q1) <= 1e-3);
    CHECK(std::abs(s.q2 - base.q2) <= 1e-3);

    auto shuffled = rows;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[3], shuffled[11]);
    const auto p = fit_power_law(shuffled);
    CHECK(p.c == base.c);
    CHECK(p.q1 == base.q1);
    CHECK(p.q2 == base.q2);
    CHECK(p.lse == base.lse);
}

TEST_CASE("fit lse trace never increases") {
    const auto f = fit_power_law(planted(0.02, 0.5, 0.45));
    REQUIRE(!f.lse_trace.empty());
    for (std::size_t i = 1; i < f.lse_trace.size(); ++i) CHECK(f.lse_trace[i] <= f.lse_trace[i - 1]);
    CHECK(f.iterations <= 10000);
}
