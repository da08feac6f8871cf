#pragma once

#include "tpmbm/association.hpp"
#include "tpmbm/estimation.hpp"
#include "tpmbm/models.hpp"
#include "tpmbm/pmbm_density.hpp"

#include <string>
#include <vector>

namespace tpmbm {

/// current: density of the trajectories alive now.
/// all:     density of every trajectory so far, alive or dead.
/// filter:  marginal PMBM filter, i.e. the current-trajectories tracker with
///          the sequence densities truncated to their last step.
enum class TrackerVariant { current, all, filter };

TrackerVariant parse_variant(const std::string& name);
std::string variant_name(TrackerVariant v);

struct TrackerConfig {
    TrackerVariant variant = TrackerVariant::all;
    std::size_t k_best = 20;           ///< Murty children per parent hypothesis
    double gate_probability = 0.999;   ///< chi-square gate mass; >= 1 disables gating
    bool exact = false;                ///< no gating, floors or approximate pruning
    double new_track_floor = 1e-4;
    std::size_t window_lag = 0;        ///< 0 keeps whole sequences
    double extract_threshold = 0.5;
    double dead_component_threshold = 0.0;
    PruneConfig prune;

    /// Window actually applied (the filter variant forces 1).
    [[nodiscard]] std::size_t effective_window_lag() const;
    void validate() const;
};

/// Runs the prediction/update/pruning recursion one scan at a time. The
/// first call to step() processes time 0.
class Tracker {
public:
    Tracker(ModelSet models, TrackerConfig config);

    /// Processes the measurements of the next time step.
    void step(const std::vector<Vector>& measurements);

    [[nodiscard]] bool started() const { return started_; }
    [[nodiscard]] Time time() const { return density_.time; }
    [[nodiscard]] const PmbmDensity& density() const { return density_; }
    [[nodiscard]] const TrackerConfig& config() const { return config_; }
    [[nodiscard]] const ModelSet& models() const { return models_; }

    [[nodiscard]] std::vector<TrajectoryEstimate> estimates() const;

private:
    ModelSet models_;
    TrackerConfig config_;
    PmbmDensity density_;
    bool started_ = false;
};

/// Replaces every sequence density by the marginal of its last `lag` steps.
PmbmDensity truncate_density(const PmbmDensity& d, std::size_t lag);

}  // namespace tpmbm
