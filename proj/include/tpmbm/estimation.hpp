#pragma once

#include "tpmbm/pmbm_density.hpp"

#include <vector>

namespace tpmbm {

/// One extracted trajectory with its bookkeeping.
struct TrajectoryEstimate {
    MeasurementRef track_origin;  ///< track id: the measurement that started the track
    std::size_t track_index = 0;
    double existence = 0.0;
    std::vector<MeasurementRef> history;
    Trajectory trajectory;
};

/// Estimates from the highest-weight global hypothesis: every selected leaf
/// with existence >= r_threshold contributes the mean of its heaviest
/// mixture component, over that component's (birth, end) span. With window
/// truncation active only the stored steps are returned, so the birth time
/// of the estimate is the first stored time.
std::vector<TrajectoryEstimate> extract_estimates(const PmbmDensity& d, double r_threshold = 0.5);

/// The trajectories of extract_estimates().
std::vector<Trajectory> extract_trajectories(const PmbmDensity& d, double r_threshold = 0.5);

/// Mean trajectory of one mixture component.
Trajectory component_trajectory(const MixtureComponent& c);

struct TargetLeaf {
    TargetBernoulli bernoulli;
    double log_weight = 0.0;
};

/// PMBM over target states at a single time.
struct TargetPmbm {
    Time time = 0;
    std::vector<TargetComponent> undetected;  ///< unnormalized PPP intensity
    std::vector<std::vector<TargetLeaf>> tracks;
    std::vector<GlobalHypothesis> hypotheses;
};

/// Marginalizes every leaf to the target Bernoulli at time k and the
/// undetected intensity to its components ending at k. Track, leaf and
/// hypothesis structure and weights are kept.
TargetPmbm marginalize_density(const PmbmDensity& d, Time k);

}  // namespace tpmbm
