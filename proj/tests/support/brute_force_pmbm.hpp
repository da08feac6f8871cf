#pragma once

#include "tpmbm/models.hpp"
#include "tpmbm/pmbm_density.hpp"

#include <map>
#include <vector>

namespace tpmbm::testing {

/// A chain of measurements hypothesized to come from one source, oldest first.
using Chain = std::vector<MeasurementRef>;
/// A global association: chains sorted lexicographically.
using Partition = std::vector<Chain>;

struct ChainPosterior {
    double weight = 0.0;           ///< lambda_FA [singleton] + target likelihood
    double target_mass = 0.0;      ///< target likelihood over every end time
    double alive_mass = 0.0;       ///< target likelihood with the target alive at the last step
    double current_existence() const { return alive_mass / weight; }
    double all_existence() const { return target_mass / weight; }
};

struct BruteForceResult {
    std::map<Partition, double> hypothesis_weights;  ///< normalized
    std::map<Chain, ChainPosterior> chains;
};

/// Exhaustive Bayes posterior over measurement-to-source partitions for a
/// PPP birth / constant P_S, P_D / uniform clutter model over the steps
/// 0 .. frames.size()-1. Each chain is a target (possibly dead by the last
/// step), and a single-measurement chain may also be clutter. Target
/// likelihoods sum over every birth time and end time with a dense Kalman
/// filter; the undetected-target factor is common to all partitions and
/// dropped.
BruteForceResult brute_force_posterior(const ModelSet& models, const std::vector<std::vector<Vector>>& frames);

/// Partition of a tracker hypothesis: the nonempty histories of its leaves.
Partition partition_of(const PmbmDensity& d, const GlobalHypothesis& h);

}  // namespace tpmbm::testing
