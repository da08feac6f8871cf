#pragma once

#include "tpmbm/models.hpp"
#include "tpmbm/pmbm_density.hpp"

namespace tpmbm {

/// Prediction of the density of current trajectories from time k-1 to k.
///
/// Existence probabilities are scaled by P_S, every mixture component is
/// extended to end at k, the undetected intensity is scaled by P_S, extended,
/// and the birth intensity at k is appended. Tracks, leaves and hypothesis
/// weights are unchanged.
PmbmDensity predict_current(const PmbmDensity& d, const MotionModel& motion,
                            const BirthModel& birth, Time k);

struct PredictAllOptions {
    /// Components that ended before k-1 and weigh less than this are dropped
    /// (0 keeps every dead component).
    double dead_component_threshold = 0.0;
};

/// Prediction of the density of all trajectories from time k-1 to k.
///
/// Existence probabilities are unchanged. Each component ending at k-1 splits
/// into a component that ends there, weight (1 - P_S) w, and one extended to
/// k with weight P_S w. Components that ended earlier are carried unchanged.
/// The undetected intensity is transformed the same way and the birth
/// intensity at k is appended.
PmbmDensity predict_all(const PmbmDensity& d, const MotionModel& motion, const BirthModel& birth,
                        Time k, const PredictAllOptions& options = {});

/// Mixture-level forms of the two transition kernels.
TrajectoryMixture predict_mixture_current(const TrajectoryMixture& f, const MotionModel& motion,
                                          Time k, double scale);
TrajectoryMixture predict_mixture_all(const TrajectoryMixture& f, const MotionModel& motion, Time k,
                                      double dead_component_threshold = 0.0);

}  // namespace tpmbm
