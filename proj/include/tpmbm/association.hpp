#pragma once

#include "tpmbm/models.hpp"
#include "tpmbm/pmbm_density.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace tpmbm {

/// Quantile of the chi-square distribution with `dof` degrees of freedom.
double chi2_quantile(double probability, int dof);

/// Squared Mahalanobis distance of z under the heaviest component of `b`
/// that ends at k; +inf when there is no such component.
double gate_distance(const Bernoulli& b, const Vector& z, const MeasurementModel& meas, Time k);

/// True iff gate_distance(b, z, meas, k) <= gamma.
bool gate(const Bernoulli& b, const Vector& z, const MeasurementModel& meas, double gamma, Time k);

/// Assignment problem for the children of one parent global hypothesis.
///
/// Rows are measurements. The first `num_tracks` columns are the parent's
/// tracks; column num_tracks + j is the new-track pseudo-column of
/// measurement j, feasible only for row j. Entries are negative log weight
/// ratios against the all-missed child, +inf where infeasible.
struct AssignmentProblem {
    std::size_t parent = 0;
    double base_log_weight = 0.0;  ///< log weight of the child with every track missed
    std::size_t num_tracks = 0;
    Matrix cost;
};

/// A child hypothesis: row j of the parent's problem goes to columns[j].
struct RankedAssignment {
    double log_weight = 0.0;
    std::size_t parent = 0;
    std::vector<int> columns;
};

/// Best children across all parents.
///
/// Each parent contributes its `k_per_parent` best children. Measurements
/// that cannot share a track are split into independent clusters, each
/// cluster is ranked with Murty's algorithm and the cluster rankings are
/// combined best-first. The merged pool is sorted by weight (descending) with
/// ties broken by (parent, columns) in lexicographic order and truncated to
/// `max_total` entries (0 = no limit).
std::vector<RankedAssignment> k_best_global(const std::vector<AssignmentProblem>& problems,
                                            std::size_t k_per_parent, std::size_t max_total = 0);

/// Hypothesis-management thresholds. None of these values come from the
/// tracking recursions; they are engineering defaults.
struct PruneConfig {
    double hypothesis_ratio = 1e-4;       ///< drop hypotheses below this fraction of the best
    std::size_t max_hypotheses = 200;     ///< N_max
    double existence_threshold = 1e-3;    ///< drop tracks below this in every hypothesis
    bool recycle = false;                 ///< move dropped tracks' mass into the undetected PPP
    std::size_t max_undetected = 50;      ///< undetected-intensity component cap
    double mixture_threshold = 1e-6;      ///< Bernoulli mixture component weight floor
    std::size_t max_mixture = 0;          ///< Bernoulli mixture component cap (0 = none)
};

/// Approximate reduction of a posterior density (see PruneConfig). Never
/// removes the highest-weight hypothesis.
PmbmDensity prune_density(const PmbmDensity& d, const PruneConfig& config);

/// Exact clean-up: removes zero-weight hypotheses and unreferenced leaves and
/// merges hypotheses that select identical leaves.
PmbmDensity compact_density(const PmbmDensity& d);

}  // namespace tpmbm
