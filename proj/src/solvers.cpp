#include "riskbench/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "riskbench/error.hpp"

namespace riskbench {

void SolverOptions::validate() const {
    if (max_em_iters < 1 || gd_iters < 1 || gd_patience < 0) {
        throw Error(ErrorKind::DomainError, "solver iteration counts must be positive");
    }
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw Error(ErrorKind::DomainError, "rel_tol must lie in (0, 1)");
    if (!(gd_learning_rate > 0.0)) throw Error(ErrorKind::DomainError, "learning rate must be positive");
}

namespace {

constexpr double kAdamEps = 1e-8;

/// f and gradient of sum_p ||p - s||^z.
double center_objective(const Eigen::Ref<const RowMat>& cluster, const Vec& s, int z, Vec* grad) {
    CompensatedSum f;
    const Eigen::Index d = s.size();
    if (grad) grad->setZero(d);
    for (Eigen::Index i = 0; i < cluster.rows(); ++i) {
        const double* p = cluster.row(i).data();
        const double sq = squared_distance(s, cluster.row(i));
        f.add(power_from_squared(sq, z));
        if (!grad) continue;
        double w;
        if (z == 2) {
            w = 2.0;
        } else {
            const double r = std::sqrt(sq);
            if (r <= 0.0) continue;
            w = z == 1 ? 1.0 / r : z * std::pow(r, z - 2);
        }
        double* g = grad->data();
        for (Eigen::Index c = 0; c < d; ++c) g[c] += w * (s(c) - p[c]);
    }
    return f.value();
}

/// f and gradient of sum_p r_p^z with r_p^2 = ||p||^2 - ||B^T p||^2.
double subspace_objective(const Eigen::Ref<const RowMat>& cluster, const Mat& B, int z, Mat* grad) {
    CompensatedSum f;
    if (grad) grad->setZero(B.rows(), B.cols());
    for (Eigen::Index i = 0; i < cluster.rows(); ++i) {
        const Vec p = cluster.row(i).transpose();
        const Vec coef = B.transpose() * p;
        const double sq = std::max(p.squaredNorm() - coef.squaredNorm(), 0.0);
        f.add(power_from_squared(sq, z));
        if (!grad) continue;
        // d(r^z)/dB = (z/2) r^(z-2) * d(r^2)/dB, d(r^2)/dB = -2 p (B^T p)^T
        double w;
        if (z == 2) {
            w = 2.0;
        } else {
            const double r = std::sqrt(sq);
            if (r <= 0.0) continue;
            w = z * std::pow(r, z - 2);
        }
        grad->noalias() -= w * p * coef.transpose();
    }
    return f.value();
}

/// Shared Adam bookkeeping for vector and matrix parameters.
template <typename T>
struct AdamState {
    T m;
    T v;
    int t = 0;

    explicit AdamState(const T& like) : m(T::Zero(like.rows(), like.cols())), v(T::Zero(like.rows(), like.cols())) {}

    void step(T& x, const T& g, double lr, const SolverOptions& opts) {
        ++t;
        m = opts.adam_beta1 * m + (1.0 - opts.adam_beta1) * g;
        v = opts.adam_beta2 * v + (1.0 - opts.adam_beta2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(opts.adam_beta1, t);
        const double c2 = 1.0 - std::pow(opts.adam_beta2, t);
        const T update = (m / c1).array() / ((v / c2).array().sqrt() + kAdamEps);
        if (opts.adam_weight_decay > 0.0) x *= (1.0 - lr * opts.adam_weight_decay);
        x -= lr * update;
    }
};

/// Plateau schedule: halve the step after `patience` iterations without a new
/// best, stop once it has shrunk by 1e3.
struct PlateauSchedule {
    double lr;
    double floor;
    int patience;
    int since_best = 0;

    PlateauSchedule(const SolverOptions& opts)
        : lr(opts.gd_learning_rate), floor(opts.gd_learning_rate * 1e-3), patience(opts.gd_patience) {}

    /// Returns false when descent should stop.
    bool record(bool improved) {
        if (improved) {
            since_best = 0;
            return true;
        }
        if (patience == 0 || ++since_best < patience) return true;
        since_best = 0;
        lr *= 0.5;
        return lr >= floor;
    }
};

}  // namespace

double cluster_center_cost(const Eigen::Ref<const RowMat>& cluster, const Eigen::Ref<const Vec>& s, int z) {
    return center_objective(cluster, s, z, nullptr);
}

double cluster_subspace_cost(const Eigen::Ref<const RowMat>& cluster, const OrthoBasis& basis, int z) {
    CompensatedSum f;
    for (Eigen::Index i = 0; i < cluster.rows(); ++i) {
        const Vec p = cluster.row(i).transpose();
        f.add(power_from_squared((p - basis.project(p)).squaredNorm(), z));
    }
    return f.value();
}

Vec center_update_gd(const Eigen::Ref<const RowMat>& cluster, int z, const Eigen::Ref<const Vec>& init,
                     const SolverOptions& opts) {
    if (cluster.rows() == 0) throw Error(ErrorKind::EmptyCluster, "gradient update on an empty cluster");
    if (init.size() != cluster.cols()) throw Error(ErrorKind::DimensionMismatch, "init has wrong dimension");
    if (z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");

    Vec s = init;
    Vec grad(s.size());
    Vec best = s;
    double best_f = std::numeric_limits<double>::infinity();
    AdamState<Vec> adam(s);
    PlateauSchedule schedule(opts);
    for (int it = 0; it < opts.gd_iters; ++it) {
        const double f = center_objective(cluster, s, z, &grad);
        const bool improved = f < best_f;
        if (improved) {
            best_f = f;
            best = s;
        }
        if (!schedule.record(improved)) break;
        adam.step(s, grad, schedule.lr, opts);
    }
    if (center_objective(cluster, s, z, nullptr) < best_f) best = s;
    return best;
}

OrthoBasis subspace_update_gd(const Eigen::Ref<const RowMat>& cluster, int z, const OrthoBasis& init,
                              const SolverOptions& opts) {
    if (cluster.rows() == 0) throw Error(ErrorKind::EmptyCluster, "gradient update on an empty cluster");
    if (init.dim() != cluster.cols()) throw Error(ErrorKind::DimensionMismatch, "basis has wrong dimension");
    if (init.rank() == 0) return init;

    Mat B = init.matrix();
    Mat grad(B.rows(), B.cols());
    OrthoBasis best = init;
    double best_f = std::numeric_limits<double>::infinity();
    AdamState<Mat> adam(B);
    PlateauSchedule schedule(opts);
    for (int it = 0; it < opts.gd_iters; ++it) {
        const double f = subspace_objective(cluster, B, z, &grad);
        const bool improved = f < best_f;
        if (improved) {
            best_f = f;
            best = OrthoBasis::from_orthonormal(B);
        }
        if (!schedule.record(improved)) break;
        adam.step(B, grad, schedule.lr, opts);
        // retract onto the Stiefel manifold
        OrthoBasis next = orthonormalize(B);
        if (next.rank() < init.rank()) break;
        B = next.matrix();
    }
    if (subspace_objective(cluster, B, z, nullptr) < best_f) best = OrthoBasis::from_orthonormal(B);
    return best;
}

namespace {

std::vector<std::vector<Eigen::Index>> group_by_label(const std::vector<int>& labels, Eigen::Index k) {
    std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[static_cast<std::size_t>(labels[i])].push_back(static_cast<Eigen::Index>(i));
    }
    return groups;
}

RowMat gather_rows(const RowMat& points, const std::vector<Eigen::Index>& idx) {
    RowMat out(static_cast<Eigen::Index>(idx.size()), points.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = points.row(idx[i]);
    return out;
}

/// Points ordered by decreasing current cost; used to reseed empty clusters.
std::vector<Eigen::Index> farthest_order(const std::vector<double>& values) {
    std::vector<Eigen::Index> order(values.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
    return order;
}

/// Generic EM driver. `step` maps (solution, cost vector) to the next solution.
template <typename Solution, typename CostFn, typename StepFn>
std::pair<Solution, SolveTrace> run_em(const Solution& init, const SolverOptions& opts, CostFn cost_of,
                                       StepFn step) {
    SolveTrace trace;
    Solution current = init;
    CostResult cur = cost_of(current);
    trace.costs.push_back(cur.total);
    // rounding residue of an exact fit, e.g. a full-rank basis
    const double zero_floor = 1e-24 * std::max(1.0, cur.total);
    for (int it = 1; it <= opts.max_em_iters; ++it) {
        trace.iterations = it;
        if (cur.total <= zero_floor) {
            trace.converged = true;
            break;
        }
        Solution next = step(current, cur);
        CostResult nxt = cost_of(next);
        if (nxt.total > cur.total) {
            trace.converged = true;
            break;
        }
        const double improvement = cur.total - nxt.total;
        current = std::move(next);
        cur = std::move(nxt);
        trace.costs.push_back(cur.total);
        if (improvement <= opts.rel_tol * trace.costs[trace.costs.size() - 2]) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(current), std::move(trace)};
}

}  // namespace

std::pair<CenterSolution, SolveTrace> em_center(const PointSet& P, int k, int z, const CenterSolution& init,
                                                const SolverOptions& opts) {
    opts.validate();
    if (init.k() != k) throw Error(ErrorKind::DomainError, "init has " + std::to_string(init.k()) + " centers, k = " + std::to_string(k));
    if (init.d() != P.d()) throw Error(ErrorKind::DimensionMismatch, "init centers have wrong dimension");
    if (z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");
    CenterSolution start = init;
    start.z = z;

    auto cost_of = [&](const CenterSolution& S) { return center_cost(P, S); };
    auto step = [&](const CenterSolution& S, const CostResult& cur) {
        CenterSolution next = S;
        const auto groups = group_by_label(cur.vec.labels, S.k());
        std::vector<Eigen::Index> reseed_order;
        std::size_t reseed_pos = 0;
        std::vector<Eigen::Index> dropped;
        for (Eigen::Index c = 0; c < S.k(); ++c) {
            const auto& members = groups[static_cast<std::size_t>(c)];
            if (members.empty()) {
                if (opts.empty_cluster_policy == EmptyClusterPolicy::Drop) {
                    dropped.push_back(c);
                    continue;
                }
                if (reseed_order.empty()) reseed_order = farthest_order(cur.vec.values);
                if (reseed_pos < reseed_order.size()) next.centers.row(c) = P.points.row(reseed_order[reseed_pos++]);
                continue;
            }
            const RowMat cluster = gather_rows(P.points, members);
            if (z == 2) {
                next.centers.row(c) = cluster.colwise().mean();
                continue;
            }
            const Vec old = S.centers.row(c).transpose();
            const Vec proposal = center_update_gd(cluster, z, old, opts);
            // accept guard: keep the old center unless the cluster cost does not increase
            if (cluster_center_cost(cluster, proposal, z) <= cluster_center_cost(cluster, old, z)) {
                next.centers.row(c) = proposal.transpose();
            }
        }
        if (!dropped.empty() && static_cast<Eigen::Index>(dropped.size()) < S.k()) {
            RowMat kept(S.k() - static_cast<Eigen::Index>(dropped.size()), S.d());
            Eigen::Index r = 0;
            for (Eigen::Index c = 0; c < S.k(); ++c) {
                if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) kept.row(r++) = next.centers.row(c);
            }
            next.centers = std::move(kept);
        }
        return next;
    };
    return run_em(start, opts, cost_of, step);
}

std::pair<SubspaceSolution, SolveTrace> em_subspace(const PointSet& P, int k, int j, int z,
                                                    const SubspaceSolution& init, const SolverOptions& opts) {
    opts.validate();
    if (init.k() != k) throw Error(ErrorKind::DomainError, "init has wrong number of subspaces");
    for (const auto& b : init.bases) {
        if (b.dim() != P.d()) throw Error(ErrorKind::DimensionMismatch, "init basis has wrong dimension");
        if (b.rank() > j) throw Error(ErrorKind::DomainError, "init basis rank exceeds j");
    }
    if (z < 1) throw Error(ErrorKind::DomainError, "z must be >= 1");
    SubspaceSolution start = init;
    start.j = j;
    start.z = z;

    auto cost_of = [&](const SubspaceSolution& U) { return subspace_cost(P, U); };
    auto step = [&](const SubspaceSolution& U, const CostResult& cur) {
        SubspaceSolution next = U;
        const auto groups = group_by_label(cur.vec.labels, U.k());
        std::vector<Eigen::Index> reseed_order;
        std::size_t reseed_pos = 0;
        std::vector<std::size_t> dropped;
        for (std::size_t c = 0; c < U.bases.size(); ++c) {
            const auto& members = groups[c];
            if (members.empty()) {
                if (opts.empty_cluster_policy == EmptyClusterPolicy::Drop) {
                    dropped.push_back(c);
                    continue;
                }
                if (reseed_order.empty()) reseed_order = farthest_order(cur.vec.values);
                while (reseed_pos < reseed_order.size()) {
                    const Vec p = P.points.row(reseed_order[reseed_pos++]).transpose();
                    if (p.norm() < kDropThreshold) continue;
                    OrthoBasis b(P.d());
                    b.append_unit(p / p.norm());
                    next.bases[c] = std::move(b);
                    break;
                }
                continue;
            }
            const RowMat cluster = gather_rows(P.points, members);
            const OrthoBasis& old = U.bases[c];
            OrthoBasis proposal(P.d());
            if (z == 2) {
                const Eigen::Index rank = std::min<Eigen::Index>({j, cluster.rows(), P.d()});
                proposal = top_j_singular_subspace(cluster, rank);
            } else {
                proposal = subspace_update_gd(cluster, z, old, opts);
            }
            if (cluster_subspace_cost(cluster, proposal, z) <= cluster_subspace_cost(cluster, old, z)) {
                next.bases[c] = std::move(proposal);
            }
        }
        if (!dropped.empty() && dropped.size() < next.bases.size()) {
            std::vector<OrthoBasis> kept;
            for (std::size_t c = 0; c < next.bases.size(); ++c) {
                if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) kept.push_back(next.bases[c]);
            }
            next.bases = std::move(kept);
        }
        return next;
    };
    return run_em(start, opts, cost_of, step);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

namespace {

double ternary_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) <= f(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return 0.5 * (lo + hi);
}

Vec geometric_median(const Eigen::Ref<const RowMat>& cluster) {
    // a data point is optimal when the pull of the others does not exceed its multiplicity
    for (Eigen::Index m = 0; m < cluster.rows(); ++m) {
        Vec pull = Vec::Zero(cluster.cols());
        int multiplicity = 0;
        for (Eigen::Index i = 0; i < cluster.rows(); ++i) {
            const Vec diff = cluster.row(i) - cluster.row(m);
            const double r = diff.norm();
            if (r == 0.0) {
                ++multiplicity;
            } else {
                pull += diff / r;
            }
        }
        if (pull.norm() <= multiplicity + 1e-12) return cluster.row(m).transpose();
    }
    Vec s = cluster.colwise().mean().transpose();
    for (int it = 0; it < 100000; ++it) {
        Vec num = Vec::Zero(s.size());
        double den = 0.0;
        for (Eigen::Index i = 0; i < cluster.rows(); ++i) {
            const double r = std::max((cluster.row(i).transpose() - s).norm(), 1e-15);
            num += cluster.row(i).transpose() / r;
            den += 1.0 / r;
        }
        const Vec next = num / den;
        const double moved = (next - s).norm();
        s = next;
        if (moved < 1e-13) break;
    }
    return s;
}

}  // namespace

Vec one_center_optimum(const Eigen::Ref<const RowMat>& cluster, int z) {
    if (cluster.rows() == 0) throw Error(ErrorKind::EmptyCluster, "empty cluster");
    if (z == 2) return cluster.colwise().mean().transpose();
    const Eigen::Index d = cluster.cols();
    if (d == 1) {
        auto f = [&](double x) {
            Vec s(1);
            s(0) = x;
            return cluster_center_cost(cluster, s, z);
        };
        Vec s(1);
        s(0) = ternary_min(f, cluster.col(0).minCoeff(), cluster.col(0).maxCoeff(), 1e-10);
        return s;
    }
    if (z == 1) return geometric_median(cluster);
    // smooth and strictly convex: cyclic coordinate ternary search
    Vec s = cluster.colwise().mean().transpose();
    const Vec lo = cluster.colwise().minCoeff().transpose();
    const Vec hi = cluster.colwise().maxCoeff().transpose();
    for (int sweep = 0; sweep < 1000; ++sweep) {
        double moved = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) {
            auto f = [&](double x) {
                Vec t = s;
                t(c) = x;
                return cluster_center_cost(cluster, t, z);
            };
            const double x = ternary_min(f, lo(c), hi(c), 1e-11);
            moved = std::max(moved, std::abs(x - s(c)));
            s(c) = x;
        }
        if (moved < 1e-10) break;
    }
    return s;
}

OracleResult erm_oracle_small(const PointSet& P, int k, int z, const ObjectiveKind& objective) {
    const auto n = static_cast<int>(P.n());
    if (n > 10) throw Error(ErrorKind::TooLarge, "exhaustive oracle supports n <= 10, got " + std::to_string(n));
    if (n < 1) throw Error(ErrorKind::EmptyInput, "oracle on an empty point set");
    if (k < 1) throw Error(ErrorKind::DomainError, "k must be >= 1");
    const bool subspace = std::holds_alternative<SubspaceObjective>(objective);
    const int j = subspace ? std::get<SubspaceObjective>(objective).j : 0;
    if (subspace && z != 2) throw Error(ErrorKind::DomainError, "subspace oracle supports z = 2 only");
    if (subspace && (j < 1 || j > P.d())) throw Error(ErrorKind::DomainError, "j must lie in [1, d]");

    const int full = (1 << n) - 1;
    std::vector<double> part_cost(static_cast<std::size_t>(full) + 1, 0.0);
    std::vector<Vec> part_center(subspace ? 0 : static_cast<std::size_t>(full) + 1);
    std::vector<OrthoBasis> part_basis(subspace ? static_cast<std::size_t>(full) + 1 : 0);
    for (int mask = 1; mask <= full; ++mask) {
        std::vector<Eigen::Index> idx;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) idx.push_back(i);
        }
        const RowMat cluster = gather_rows(P.points, idx);
        if (!subspace) {
            Vec s = one_center_optimum(cluster, z);
            part_cost[static_cast<std::size_t>(mask)] = cluster_center_cost(cluster, s, z);
            part_center[static_cast<std::size_t>(mask)] = std::move(s);
        } else {
            // independent route: dense symmetric eigensolver on the Gram matrix
            const Mat gram = cluster.transpose() * cluster;
            Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
            const Eigen::Index d = P.d();
            Mat top(d, j);
            for (int c = 0; c < j; ++c) top.col(c) = eig.eigenvectors().col(d - 1 - c);
            OrthoBasis b = OrthoBasis::from_orthonormal(orthonormalize(top).matrix());
            part_cost[static_cast<std::size_t>(mask)] = cluster_subspace_cost(cluster, b, 2);
            part_basis[static_cast<std::size_t>(mask)] = std::move(b);
        }
    }

    // best[m][c]: minimum cost of splitting mask m into at most c parts
    const int kk = std::min(k, n);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(static_cast<std::size_t>(full) + 1, std::vector<double>(kk + 1, inf));
    std::vector<std::vector<int>> choice(static_cast<std::size_t>(full) + 1, std::vector<int>(kk + 1, 0));
    for (int c = 0; c <= kk; ++c) best[0][static_cast<std::size_t>(c)] = 0.0;
    for (int mask = 1; mask <= full; ++mask) {
        const int low = mask & -mask;
        for (int c = 1; c <= kk; ++c) {
            // the part containing the lowest set bit
            const int rest = mask ^ low;
            for (int sub = rest;; sub = (sub - 1) & rest) {
                const int part = sub | low;
                const double v = part_cost[static_cast<std::size_t>(part)] +
                                 best[static_cast<std::size_t>(mask ^ part)][static_cast<std::size_t>(c - 1)];
                if (v < best[static_cast<std::size_t>(mask)][static_cast<std::size_t>(c)]) {
                    best[static_cast<std::size_t>(mask)][static_cast<std::size_t>(c)] = v;
                    choice[static_cast<std::size_t>(mask)][static_cast<std::size_t>(c)] = part;
                }
                if (sub == 0) break;
            }
        }
    }

    OracleResult result;
    result.cost = best[static_cast<std::size_t>(full)][static_cast<std::size_t>(kk)];
    result.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> parts;
    for (int mask = full, c = kk; mask != 0; --c) {
        const int part = choice[static_cast<std::size_t>(mask)][static_cast<std::size_t>(c)];
        parts.push_back(part);
        mask ^= part;
    }
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (int i = 0; i < n; ++i) {
            if (parts[p] & (1 << i)) result.labels[static_cast<std::size_t>(i)] = static_cast<int>(p);
        }
    }
    if (!subspace) {
        CenterSolution S;
        S.z = z;
        S.centers.resize(k, P.d());
        for (int c = 0; c < k; ++c) {
            const int part = parts[static_cast<std::size_t>(std::min<std::size_t>(c, parts.size() - 1))];
            S.centers.row(c) = part_center[static_cast<std::size_t>(part)].transpose();
        }
        result.solution = std::move(S);
    } else {
        SubspaceSolution U;
        U.j = j;
        U.z = z;
        for (int c = 0; c < k; ++c) {
            const int part = parts[static_cast<std::size_t>(std::min<std::size_t>(c, parts.size() - 1))];
            U.bases.push_back(part_basis[static_cast<std::size_t>(part)]);
        }
        result.solution = std::move(U);
    }
    return result;
}

}  // namespace riskbench
