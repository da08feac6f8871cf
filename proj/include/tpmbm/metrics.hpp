#pragma once

#include "tpmbm/trajectory.hpp"

#include <cstddef>
#include <vector>

namespace tpmbm {

/// GOSPA parameters; alpha is fixed at 2.
struct GospaParams {
    double c = 100.0;
    double p = 1.0;

    void validate() const;
};

/// GOSPA value and its decomposition. The cost terms are in p-th power units
/// (they add up to total^p); for p = 1 they are the plain costs.
struct GospaResult {
    double total = 0.0;
    double location = 0.0;
    double missed = 0.0;
    double false_ = 0.0;
    std::size_t num_missed = 0;
    std::size_t num_false = 0;
    std::size_t num_assigned = 0;
};

/// Optimal-assignment GOSPA with alpha = 2 between two point sets. Points
/// are compared on their first `dims` coordinates (0 = all coordinates).
/// Pairs at distance >= c count as one missed and one false target.
GospaResult gospa(const std::vector<Vector>& truth, const std::vector<Vector>& est,
                  const GospaParams& params, std::size_t dims = 0);

struct TrajMetricParams {
    double c = 100.0;
    double p = 1.0;
    double gamma = 20.0;

    void validate() const;
};

/// Trajectory metric value and decomposition, in p-th power units like GospaResult.
struct TrajMetricResult {
    double total = 0.0;
    double location = 0.0;
    double missed = 0.0;
    double false_ = 0.0;
    double switch_ = 0.0;
    bool exact = true;  ///< false when the LP relaxation was used
};

enum class TrajMetricMethod { automatic, exact, lp };

/// Trajectory metric with switching cost over the window [t_begin, t_end].
///
/// At every time step each true trajectory is assigned to at most one
/// estimate (or to nothing). Per step, an assigned pair costs min(d, c)^p
/// when both exist and c^p / 2 when only one does; an unassigned trajectory
/// costs c^p / 2 when it exists. Changing a truth's assignment between
/// consecutive steps costs gamma^p, or gamma^p / 2 when one side is
/// "nothing". `dims` selects the compared coordinates as in gospa().
///
/// The exact minimum is found by dynamic programming over assignments,
/// restricted to pairs that come closer than c at some common time (other
/// pairs are never strictly better than leaving both unassigned) and split
/// into independent groups. Groups with more than `max_exact_states`
/// assignments use the linear-programming relaxation instead.
TrajMetricResult traj_metric(const std::vector<Trajectory>& truth,
                             const std::vector<Trajectory>& est, const TrajMetricParams& params,
                             Time t_begin, Time t_end, std::size_t dims = 0,
                             TrajMetricMethod method = TrajMetricMethod::automatic,
                             std::size_t max_exact_states = 300);

/// Same, over the window spanned by all trajectories. Throws on an empty window.
TrajMetricResult traj_metric(const std::vector<Trajectory>& truth,
                             const std::vector<Trajectory>& est, const TrajMetricParams& params,
                             std::size_t dims = 0);

}  // namespace tpmbm
