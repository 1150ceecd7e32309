#ifndef RISKBENCH_SOLVERS_HPP
#define RISKBENCH_SOLVERS_HPP

#include <variant>
#include <vector>

#include "riskbench/objectives.hpp"

namespace riskbench {

enum class EmptyClusterPolicy { ReseedFarthest, Drop };

struct SolverOptions {
    int max_em_iters = 100;
    double rel_tol = 1e-6;
    double gd_learning_rate = 0.01;
    int gd_iters = 500;
    /// Iterations without a new best before the step size is halved; 0 disables.
    int gd_patience = 50;
    /// Adam moment decay rates and decoupled weight decay (0 keeps f unbiased).
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_weight_decay = 0.0;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::ReseedFarthest;

    void validate() const;
};

struct SolveTrace {
    std::vector<double> costs;  // costs[0] is the cost of the initial solution
    int iterations = 0;
    bool converged = false;
};

/// sum_p ||p - s||^z over the rows of cluster.
double cluster_center_cost(const Eigen::Ref<const RowMat>& cluster, const Eigen::Ref<const Vec>& s, int z);

/// Adam descent on f(s) = sum_p ||p - s||^z (subgradient 0 at p = s for z = 1).
/// Returns the best iterate seen. Throws EmptyCluster.
Vec center_update_gd(const Eigen::Ref<const RowMat>& cluster, int z, const Eigen::Ref<const Vec>& init,
                     const SolverOptions& opts);

/// EM for (k,z)-clustering. z = 2 uses the cluster mean (Lloyd), other z use
/// center_update_gd behind an accept guard. The returned cost never exceeds
/// the initial cost.
std::pair<CenterSolution, SolveTrace> em_center(const PointSet& P, int k, int z, const CenterSolution& init,
                                                const SolverOptions& opts = {});

/// sum_p ||(I - BB^T)p||^z over the rows of cluster.
double cluster_subspace_cost(const Eigen::Ref<const RowMat>& cluster, const OrthoBasis& basis, int z);

/// Projected Adam on the basis for sum_p r_p^z with r_p^2 = ||p||^2 - ||B^T p||^2,
/// re-orthonormalising after each step. Returns the best basis seen.
OrthoBasis subspace_update_gd(const Eigen::Ref<const RowMat>& cluster, int z, const OrthoBasis& init,
                              const SolverOptions& opts);

/// EM for (k,j,z)-clustering. z = 2 uses the top-j singular subspace of each
/// cluster, other z use subspace_update_gd behind an accept guard.
std::pair<SubspaceSolution, SolveTrace> em_subspace(const PointSet& P, int k, int j, int z,
                                                    const SubspaceSolution& init, const SolverOptions& opts = {});

struct CenterObjective {};
struct SubspaceObjective {
    int j = 1;
};
using ObjectiveKind = std::variant<CenterObjective, SubspaceObjective>;

struct OracleResult {
    std::variant<CenterSolution, SubspaceSolution> solution;
    double cost = 0.0;
    std::vector<int> labels;
};

/// Exact ERM for tiny inputs (n <= 10): minimises over every partition of P
/// into at most k parts, solving each part's 1-cluster problem directly.
/// Subspace objectives are supported for z = 2 only. Throws TooLarge.
OracleResult erm_oracle_small(const PointSet& P, int k, int z, const ObjectiveKind& objective);

/// 1-cluster optimum used by the oracle (exposed for tests).
Vec one_center_optimum(const Eigen::Ref<const RowMat>& cluster, int z);

}  // namespace riskbench

#endif  // RISKBENCH_SOLVERS_HPP
