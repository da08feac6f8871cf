#pragma once

#include "tpmbm/models.hpp"
#include "tpmbm/pmbm_density.hpp"

#include <map>
#include <string>
#include <vector>

namespace tpmbm::testing {

struct OracleComponent {
    double weight = 0.0;
    Vector mean;
    Matrix cov;
};

struct OracleLeaf {
    double existence = 0.0;
    double log_weight = 0.0;
    std::vector<OracleComponent> density;
};

/// Covariance-form PMBM filter over single-time target states.
struct OraclePmbm {
    Time time = 0;
    std::vector<OracleComponent> undetected;
    std::vector<std::vector<OracleLeaf>> tracks;
    std::map<std::vector<std::uint32_t>, double> hypotheses;  ///< leaf choice -> normalized log weight
};

/// Target-space marginal of a current-trajectories density: for each leaf,
/// existence times the weight of the components ending at d.time, and the
/// final-step moments of those components.
OraclePmbm oracle_from_tracker(const PmbmDensity& d);

/// Prediction and update with the same child indexing as the tracker: the
/// child of leaf l for measurement j (0 = missed) is l + h j, and every
/// measurement j opens a new track with leaves {absent, detected}. Every
/// feasible assignment of every parent is enumerated.
OraclePmbm oracle_step(const OraclePmbm& prior, const ModelSet& models, const std::vector<Vector>& z, Time k);

struct OracleComparison {
    double existence_error = 0.0;
    double moment_error = 0.0;
    double weight_error = 0.0;      ///< leaf log weights and component weights
    double hypothesis_error = 0.0;  ///< normalized linear hypothesis weights
    bool structure_ok = true;
    std::string message;
};

/// Leaf-wise comparison of oracle and tracker (both at the same time).
OracleComparison compare(const OraclePmbm& oracle, const OraclePmbm& tracker);

}  // namespace tpmbm::testing
