#ifndef RISKBENCH_REDUCTION_HPP
#define RISKBENCH_REDUCTION_HPP

#include <cstddef>
#include <vector>

#include "riskbench/linalg.hpp"
#include "riskbench/objectives.hpp"

namespace riskbench {

/// Output of the greedy adaptive projection.
struct AdaptiveReduction {
    std::vector<std::size_t> M;           // selected point indices, in selection order
    Projector pi{OrthoBasis()};           // projection onto span(P[M])
    int rounds = 0;
    std::vector<double> potential_trace;  // ||U^T Pi_t||_F^2 for t = 0..rounds
};

/// Adds points to M while some p has ||U^T (I-Pi) p|| > eps ||(I-Pi) p||.
/// Each scan restarts at index 0 and takes the first violator.
/// Requires 0 < eps < 1. On return |M| <= ceil(rank(U) / eps^2).
AdaptiveReduction adaptive_projection(const PointSet& P, const OrthoBasis& U, double eps);

/// Grid of pitch eps/sqrt(d) intersected with the unit ball. Covers B_2^d at
/// scale eps: rounding each coordinate toward zero stays inside the ball.
/// Limited to d <= 4 and at most kMaxGridPoints candidate grid points.
std::vector<Vec> unit_ball_net(Eigen::Index d, double eps);

constexpr double kMaxGridPoints = 2e6;

/// (1 + 2/eps)^d
double unit_ball_net_bound(Eigen::Index d, double eps);

/// delta = eps^2 / (4 (6z)^z), the grid scale that turns k-tuples of grid
/// points into an eps-net of center cost vectors.
double clustering_net_spacing(double eps, int z);

/// Cost vectors of every multiset of k grid points from unit_ball_net(d, delta).
/// Only for tiny instances: throws TooLarge past kMaxGridPoints vectors.
std::vector<CostVector> center_net_from_grid(const PointSet& P, int k, int z, double delta);

struct NetReport {
    double max_deviation = 0.0;     // max over candidates of min over net of ||v - v'||_inf
    std::size_t worst_candidate = 0;
    std::size_t nearest_net_index = 0;
    std::size_t witness_point = 0;  // coordinate attaining the deviation for the worst candidate
    bool passed = true;
};

NetReport verify_clustering_net(const PointSet& P, const std::vector<CenterSolution>& candidates,
                                const std::vector<CostVector>& net, double eps);
NetReport verify_cost_vector_net(const std::vector<CostVector>& vectors, const std::vector<CostVector>& net,
                                 double eps);

enum class NetKind { Center, Subspace };

struct NetSizeBound {
    double log_size = 0.0;
    NetKind kind = NetKind::Center;
    int k = 1, j = 1, z = 1;
    double eps = 0.0;
    double n = 1.0;
};

/// Log of the net-size bounds with the O(1) constant set to 1:
///   center:   z^3 k eps^-2 log n (log z + log 1/eps)
///   subspace: (3z)^(z+2) k j eps^-2 (log n + j log(j/eps)) log 1/eps
NetSizeBound net_size_bound(NetKind kind, int k, int j, int z, double eps, double n);

}  // namespace riskbench

#endif  // RISKBENCH_REDUCTION_HPP
