#ifndef RISKBENCH_SEEDING_HPP
#define RISKBENCH_SEEDING_HPP

#include "riskbench/objectives.hpp"
#include "riskbench/rng.hpp"

namespace riskbench {

/// D^z sampling: the first center is uniform over P, every further center is
/// drawn with probability proportional to (distance to the nearest chosen
/// center)^z. Once all remaining distances are zero (fewer than k distinct
/// points), the leftover centers are drawn uniformly from P.
CenterSolution dz_seed(const PointSet& P, int k, int z, SeededRng& rng);

/// Adaptive squared-residual sampling of k subspaces of rank at most j.
///
/// Each subspace is grown over j rounds. In every round a point is drawn with
/// probability proportional to its squared residual against the partial
/// solution: the span of the points already picked for this subspace and
/// every subspace completed earlier. The residual of the drawn point is
/// appended to the basis. If the residual mass is zero the subspace stops
/// early with rank < j; a subspace whose first round finds zero mass is
/// seeded with a uniformly drawn nonzero point instead.
/// Throws EmptyInput for empty P, AllZero when every point is the origin.
SubspaceSolution adaptive_subspace_seed(const PointSet& P, int k, int j, SeededRng& rng, int z = 2);

}  // namespace riskbench

#endif  // RISKBENCH_SEEDING_HPP
