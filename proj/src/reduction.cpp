#include "riskbench/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskbench/error.hpp"

namespace riskbench {

namespace {

constexpr double kViolationSlack = 1e-12;

double potential(const OrthoBasis& U, const OrthoBasis& pi) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < pi.rank(); ++c) acc += U.coefficients(pi.col(c)).squaredNorm();
    return acc;
}

}  // namespace

AdaptiveReduction adaptive_projection(const PointSet& P, const OrthoBasis& U, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::DomainError, "eps must lie in (0, 1)");
    if (U.dim() != P.d()) throw Error(ErrorKind::DimensionMismatch, "basis and points differ in dimension");

    AdaptiveReduction out;
    OrthoBasis span(P.d());
    out.potential_trace.push_back(0.0);
    const std::size_t cap = static_cast<std::size_t>(std::ceil(static_cast<double>(U.rank()) / (eps * eps)));

    while (out.M.size() <= cap) {
        bool found = false;
        for (Eigen::Index i = 0; i < P.n(); ++i) {
            Vec r = orthogonal_residual(span, P.row(i).transpose());
            const double rn = r.norm();
            if (rn <= kDropThreshold) continue;
            if (U.coefficients(r).norm() > eps * rn + kViolationSlack) {
                r = orthogonal_residual(span, r / rn);
                span.append_unit(r / r.norm());
                out.M.push_back(static_cast<std::size_t>(i));
                out.potential_trace.push_back(potential(U, span));
                found = true;
                break;
            }
        }
        if (!found) break;
    }
    out.rounds = static_cast<int>(out.M.size());
    out.pi = Projector(std::move(span));
    return out;
}

double unit_ball_net_bound(Eigen::Index d, double eps) {
    return std::pow(1.0 + 2.0 / eps, static_cast<double>(d));
}

std::vector<Vec> unit_ball_net(Eigen::Index d, double eps) {
    if (d < 1 || !(eps > 0.0)) throw Error(ErrorKind::DomainError, "unit_ball_net needs d >= 1 and eps > 0");
    const double h = eps / std::sqrt(static_cast<double>(d));
    const long m = static_cast<long>(std::floor(1.0 / h + 1e-12));
    const double side = static_cast<double>(2 * m + 1);
    if (d > 4 || std::pow(side, static_cast<double>(d)) > kMaxGridPoints) {
        throw Error(ErrorKind::TooLarge, "grid net with d = " + std::to_string(d) + ", eps = " + std::to_string(eps) +
                                             " is too large to enumerate");
    }
    std::vector<Vec> net;
    std::vector<long> idx(static_cast<std::size_t>(d), -m);
    while (true) {
        Vec q(d);
        for (Eigen::Index c = 0; c < d; ++c) q(c) = static_cast<double>(idx[static_cast<std::size_t>(c)]) * h;
        if (q.squaredNorm() <= 1.0 + 1e-12) net.push_back(std::move(q));
        Eigen::Index c = d - 1;
        while (c >= 0 && idx[static_cast<std::size_t>(c)] == m) {
            idx[static_cast<std::size_t>(c)] = -m;
            --c;
        }
        if (c < 0) break;
        ++idx[static_cast<std::size_t>(c)];
    }
    return net;
}

double clustering_net_spacing(double eps, int z) {
    if (!(eps > 0.0) || z < 1) throw Error(ErrorKind::DomainError, "need eps > 0 and z >= 1");
    return eps * eps / (4.0 * std::pow(6.0 * z, z));
}

std::vector<CostVector> center_net_from_grid(const PointSet& P, int k, int z, double delta) {
    if (k < 1) throw Error(ErrorKind::DomainError, "k must be >= 1");
    const auto grid = unit_ball_net(P.d(), delta);
    const double g = static_cast<double>(grid.size());
    // multisets of size k: C(g + k - 1, k)
    double count = 1.0;
    for (int i = 0; i < k; ++i) count = count * (g + i) / (i + 1);
    if (count > kMaxGridPoints) throw Error(ErrorKind::TooLarge, "clustering net has too many elements");

    std::vector<CostVector> net;
    std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
    CenterSolution S;
    S.centers = RowMat(k, P.d());
    S.z = z;
    while (true) {
        for (int c = 0; c < k; ++c) S.centers.row(c) = grid[pick[static_cast<std::size_t>(c)]].transpose();
        net.push_back(center_cost(P, S).vec);
        int c = k - 1;
        while (c >= 0 && pick[static_cast<std::size_t>(c)] == grid.size() - 1) --c;
        if (c < 0) break;
        ++pick[static_cast<std::size_t>(c)];
        for (int r = c + 1; r < k; ++r) pick[static_cast<std::size_t>(r)] = pick[static_cast<std::size_t>(c)];
    }
    return net;
}

NetReport verify_cost_vector_net(const std::vector<CostVector>& vectors, const std::vector<CostVector>& net,
                                 double eps) {
    if (net.empty()) throw Error(ErrorKind::EmptyNet, "net is empty");
    NetReport rep;
    for (std::size_t c = 0; c < vectors.size(); ++c) {
        const auto& v = vectors[c].values;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0, best_witness = 0;
        for (std::size_t m = 0; m < net.size(); ++m) {
            const auto& w = net[m].values;
            if (w.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "net vector length differs from |P|");
            double dev = 0.0;
            std::size_t at = 0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double diff = std::abs(v[i] - w[i]);
                if (diff > dev) {
                    dev = diff;
                    at = i;
                }
                if (dev >= best) break;
            }
            if (dev < best) {
                best = dev;
                best_idx = m;
                best_witness = at;
            }
        }
        if (c == 0 || best > rep.max_deviation) {
            rep.max_deviation = best;
            rep.worst_candidate = c;
            rep.nearest_net_index = best_idx;
            rep.witness_point = best_witness;
        }
    }
    rep.passed = rep.max_deviation <= eps;
    return rep;
}

NetReport verify_clustering_net(const PointSet& P, const std::vector<CenterSolution>& candidates,
                                const std::vector<CostVector>& net, double eps) {
    if (net.empty()) throw Error(ErrorKind::EmptyNet, "net is empty");
    std::vector<CostVector> vectors;
    vectors.reserve(candidates.size());
    for (const auto& S : candidates) vectors.push_back(center_cost(P, S).vec);
    return verify_cost_vector_net(vectors, net, eps);
}

NetSizeBound net_size_bound(NetKind kind, int k, int j, int z, double eps, double n) {
    if (k < 1 || j < 1 || z < 1 || !(n >= 1.0)) throw Error(ErrorKind::DomainError, "k, j, z, n must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::DomainError, "eps must lie in (0, 1)");
    NetSizeBound b;
    b.kind = kind;
    b.k = k;
    b.j = j;
    b.z = z;
    b.eps = eps;
    b.n = n;
    const double inv2 = 1.0 / (eps * eps);
    const double log_inv = std::log(1.0 / eps);
    if (kind == NetKind::Center) {
        b.log_size = std::pow(z, 3) * k * inv2 * std::log(n) * (std::log(static_cast<double>(z)) + log_inv);
    } else {
        b.log_size = std::pow(3.0 * z, z + 2) * k * j * inv2 * (std::log(n) + j * std::log(j / eps)) * log_inv;
    }
    return b;
}

}  // namespace riskbench
