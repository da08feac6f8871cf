#include "tpmbm/tracker.hpp"

#include "tpmbm/predict.hpp"
#include "tpmbm/update.hpp"

#include <stdexcept>

namespace tpmbm {

TrackerVariant parse_variant(const std::string& name) {
    if (name == "current") return TrackerVariant::current;
    if (name == "all") return TrackerVariant::all;
    if (name == "filter") return TrackerVariant::filter;
    throw std::invalid_argument("unknown tracker variant '" + name + "' (expected current, all or filter)");
}

std::string variant_name(TrackerVariant v) {
    switch (v) {
        case TrackerVariant::current: return "current";
        case TrackerVariant::all: return "all";
        case TrackerVariant::filter: return "filter";
    }
    return "unknown";
}

std::size_t TrackerConfig::effective_window_lag() const {
    return variant == TrackerVariant::filter ? 1 : window_lag;
}

void TrackerConfig::validate() const {
    if (k_best == 0) throw std::invalid_argument("tracker: k_best must be at least 1");
    if (!(gate_probability > 0.0)) throw std::invalid_argument("tracker: gate_probability must be positive");
    if (!(new_track_floor >= 0.0)) throw std::invalid_argument("tracker: new_track_floor must be nonnegative");
    if (!(extract_threshold >= 0.0 && extract_threshold <= 1.0)) {
        throw std::invalid_argument("tracker: extract_threshold outside [0, 1]");
    }
    if (!(prune.hypothesis_ratio >= 0.0) || !(prune.existence_threshold >= 0.0) ||
        !(prune.mixture_threshold >= 0.0) || !(dead_component_threshold >= 0.0)) {
        throw std::invalid_argument("tracker: pruning thresholds must be nonnegative");
    }
    if (variant == TrackerVariant::all && window_lag > 0) {
        throw std::invalid_argument("tracker: window truncation is only defined for current trajectories");
    }
}

PmbmDensity truncate_density(const PmbmDensity& d, std::size_t lag) {
    if (lag == 0) return d;
    PmbmDensity out = d;
    for (auto& c : out.undetected.components) c.density = c.density.truncated(lag);
    for (auto& t : out.tracks) {
        for (auto& leaf : t.leaves) {
            for (auto& c : leaf.density.components) c.density = c.density.truncated(lag);
        }
    }
    return out;
}

Tracker::Tracker(ModelSet models, TrackerConfig config)
    : models_(std::move(models)), config_(std::move(config)) {
    config_.validate();
    models_.birth.validate(models_.motion.state_dim());
    models_.clutter.validate(models_.measurement.meas_dim());
    if (models_.measurement.obs().cols() != static_cast<Eigen::Index>(models_.motion.state_dim())) {
        throw std::invalid_argument("tracker: measurement model does not match the state dimension");
    }
}

void Tracker::step(const std::vector<Vector>& measurements) {
    PmbmDensity predicted;
    Time k = 0;
    if (!started_) {
        predicted = PmbmDensity::with_undetected(birth_intensity_at(models_.birth, 0), 0);
    } else {
        k = density_.time + 1;
        if (config_.variant == TrackerVariant::all) {
            predicted = predict_all(density_, models_.motion, models_.birth, k,
                                    PredictAllOptions{config_.dead_component_threshold});
        } else {
            predicted = predict_current(density_, models_.motion, models_.birth, k);
        }
    }

    UpdateOptions opts;
    opts.exact = config_.exact;
    opts.k_best = config_.k_best;
    opts.new_track_floor = config_.new_track_floor;
    opts.max_children = config_.exact ? 0 : config_.prune.max_hypotheses;
    if (!config_.exact && config_.gate_probability < 1.0) {
        opts.gate_threshold =
            chi2_quantile(config_.gate_probability, static_cast<int>(models_.measurement.meas_dim()));
    }
    PmbmDensity posterior =
        update(predicted, measurements, models_.measurement, models_.clutter, k, opts);
    posterior = config_.exact ? compact_density(posterior) : prune_density(posterior, config_.prune);
    density_ = truncate_density(posterior, config_.effective_window_lag());
    started_ = true;
}

std::vector<TrajectoryEstimate> Tracker::estimates() const {
    if (!started_) return {};
    return extract_estimates(density_, config_.extract_threshold);
}

}  // namespace tpmbm
