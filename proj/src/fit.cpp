#include "riskbench/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <tuple>

#include "riskbench/error.hpp"
#include "riskbench/objectives.hpp"

namespace riskbench {

namespace {

// Loss in the centred coordinates a = log c + q1 mean(log k) - q2 mean(log n),
// divided by sum y^2 so the step sizes do not depend on the scale of y.
struct Problem {
    std::vector<double> x1, x2, y;
    double scale = 1.0;

    double loss(const std::array<double, 3>& t) const {
        CompensatedSum s;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y[i] - std::exp(t[0] + t[1] * x1[i] + t[2] * x2[i]);
            s.add(e * e);
        }
        return s.value() / scale;
    }

    std::array<double, 3> gradient(const std::array<double, 3>& t) const {
        std::array<double, 3> g{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double m = std::exp(t[0] + t[1] * x1[i] + t[2] * x2[i]);
            const double w = -2.0 * (y[i] - m) * m / scale;
            g[0] += w;
            g[1] += w * x1[i];
            g[2] += w * x2[i];
        }
        return g;
    }
};

}  // namespace

FitResult fit_power_law(std::vector<FitRow> rows, const FitOptions& opts) {
    std::set<double> ks, ns;
    for (const auto& r : rows) {
        if (!(r.k > 0.0 && r.n > 0.0)) throw Error(ErrorKind::DomainError, "k and n must be positive");
        ks.insert(r.k);
        ns.insert(r.n);
    }
    if (rows.size() < 3 || ns.size() < 2 || (ks.size() < 2 && !opts.fix_q1)) {
        throw Error(ErrorKind::Underdetermined,
                    "need >= 3 rows with >= 2 distinct n and >= 2 distinct k (or a fixed q1); got " +
                        std::to_string(rows.size()) + " rows, " + std::to_string(ks.size()) + " k, " +
                        std::to_string(ns.size()) + " n");
    }
    // canonical order makes the result independent of input order
    std::sort(rows.begin(), rows.end(),
              [](const FitRow& a, const FitRow& b) { return std::tie(a.k, a.n, a.y) < std::tie(b.k, b.n, b.y); });

    Problem pr;
    double mk = 0.0, mn = 0.0, ymax = 0.0;
    for (const auto& r : rows) {
        mk += std::log(r.k);
        mn += std::log(r.n);
        ymax = std::max(ymax, std::abs(r.y));
    }
    mk /= static_cast<double>(rows.size());
    mn /= static_cast<double>(rows.size());
    CompensatedSum ysq;
    for (const auto& r : rows) {
        pr.x1.push_back(std::log(r.k) - mk);
        pr.x2.push_back(mn - std::log(r.n));
        pr.y.push_back(r.y);
        ysq.add(r.y * r.y);
    }
    pr.scale = ysq.value() > 0.0 ? ysq.value() : 1.0;

    // log c from the median of log y - q1 log k + q2 log n at q1 = q2 = 0.5
    const double q1_0 = opts.fix_q1.value_or(0.5);
    const double q2_0 = 0.5;
    const double floor = ymax > 0.0 ? 1e-12 * ymax : 1e-12;
    std::vector<double> logc;
    for (const auto& r : rows) logc.push_back(std::log(std::max(r.y, floor)) - q1_0 * std::log(r.k) + q2_0 * std::log(r.n));
    std::nth_element(logc.begin(), logc.begin() + static_cast<long>(logc.size() / 2), logc.end());
    const double logc0 = logc[logc.size() / 2];

    std::array<double, 3> t{logc0 + q1_0 * mk - q2_0 * mn, q1_0, q2_0};
    double cur = pr.loss(t);
    FitResult out;
    out.rows = rows.size();
    out.lse_trace.push_back(cur * pr.scale);
    double step = 1.0;
    int it = 0;
    for (; it < opts.max_iters && cur > 0.0; ++it) {
        auto g = pr.gradient(t);
        if (opts.fix_q1) g[1] = 0.0;
        const double gn = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        if (gn == 0.0) break;
        step *= 2.0;
        std::array<double, 3> next{};
        double val = cur;
        while (step > 1e-300) {
            for (int c = 0; c < 3; ++c) next[static_cast<std::size_t>(c)] = t[static_cast<std::size_t>(c)] - step * g[static_cast<std::size_t>(c)];
            val = pr.loss(next);
            if (val < cur) break;
            step *= 0.5;
        }
        if (!(val < cur)) break;
        const double rel = (cur - val) / cur;
        t = next;
        cur = val;
        out.lse_trace.push_back(cur * pr.scale);
        if (rel < opts.rel_tol) {
            ++it;
            break;
        }
    }
    out.iterations = it;
    out.q1 = t[1];
    out.q2 = t[2];
    out.c = std::exp(t[0] - t[1] * mk + t[2] * mn);
    out.initial_lse = out.lse_trace.front();
    // report the plain sum of squares at the returned parameters
    CompensatedSum s;
    for (const auto& r : rows) {
        const double e = r.y - out.c * std::pow(r.k, out.q1) / std::pow(r.n, out.q2);
        s.add(e * e);
    }
    out.lse = s.value();
    return out;
}

}  // namespace riskbench
