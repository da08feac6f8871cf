#pragma once

#include "tpmbm/association.hpp"
#include "tpmbm/metrics.hpp"
#include "tpmbm/trajectory.hpp"

#include <vector>

namespace tpmbm::testing {

struct EnumeratedAssignment {
    double cost = 0.0;
    std::vector<int> row_to_col;
};

/// Every assignment of rows to distinct columns with finite total cost,
/// sorted by cost and then lexicographically.
std::vector<EnumeratedAssignment> enumerate_assignments(const Matrix& cost);

/// Every child of every problem as (log weight, parent, columns), sorted by
/// weight descending, then parent, then columns.
std::vector<RankedAssignment> enumerate_global(const std::vector<AssignmentProblem>& problems);

/// GOSPA (alpha = 2) by enumerating every partial matching.
double gospa_brute_force(const std::vector<Vector>& x, const std::vector<Vector>& y, double c, double p,
                         std::size_t dims = 0);

/// Trajectory metric by enumerating every sequence of per-step partial
/// assignments over [t_begin, t_end].
double traj_metric_brute_force(const std::vector<Trajectory>& truth, const std::vector<Trajectory>& est,
                               const TrajMetricParams& params, Time t_begin, Time t_end, std::size_t dims = 0);

}  // namespace tpmbm::testing
