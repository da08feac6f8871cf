#pragma once

#include "tpmbm/models.hpp"
#include "tpmbm/pmbm_density.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace tpmbm {

struct UpdateOptions {
    /// Disables gating and the new-track floor and keeps every child hypothesis.
    bool exact = false;
    /// Squared Mahalanobis gate; +inf disables gating.
    double gate_threshold = kInf;
    /// A new track is created only if its weight exceeds lambda_FA(z) (1 + floor).
    double new_track_floor = 1e-4;
    /// Murty children per parent hypothesis.
    std::size_t k_best = 20;
    /// Cap on the merged child pool (0 = none).
    std::size_t max_children = 0;
};

/// Measurement update of a predicted PMBM density at time k.
///
/// Continuing track i with h leaves gets h (1 + m) leaves: leaf l + h j is
/// the child of prior leaf l for measurement j (j = 0 is the missed
/// detection, j >= 1 measurement j - 1). Children that cannot occur (zero
/// weight or gated out) are kept as zero-weight placeholders without a
/// density, so the leaf count law holds. Each measurement j starts a new
/// track with origin (k, j): leaf 0 does not exist, leaf 1 is the detection.
/// Global hypotheses are the best child assignments of each parent.
PmbmDensity update(const PmbmDensity& d, const std::vector<Vector>& measurements,
                   const MeasurementModel& meas, const ClutterModel& clutter, Time k,
                   const UpdateOptions& options = {});

struct MissUpdate {
    double mass = 0.0;  ///< weight not detected: sum over live (1 - P_D) w plus dead w
    TrajectoryMixture posterior;
};

/// Missed-detection reweighting of a normalized mixture. When the mass is 0
/// the prior is returned unchanged as the posterior.
MissUpdate mixture_miss_update(const TrajectoryMixture& f, double detection_prob, Time k);

struct DetectUpdate {
    double log_likelihood = kNegInf;  ///< log of sum over live P_D w N(z; H m, H P H^T + R)
    TrajectoryMixture posterior;       ///< live components only, measurement-updated
};

/// Detection update of a normalized mixture with measurement z. The
/// posterior is empty when there are no live components.
DetectUpdate mixture_detect_update(const TrajectoryMixture& f, const MeasurementModel& meas,
                                   const Vector& z, Time k);

}  // namespace tpmbm
