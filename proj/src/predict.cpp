#include "tpmbm/predict.hpp"

#include <stdexcept>

namespace tpmbm {

namespace {

void check_step(const PmbmDensity& d, Time k) {
    if (k == 0 || d.time + 1 != k) {
        throw std::invalid_argument("predict: density time must be k-1");
    }
}

void append_birth(TrajectoryMixture& undetected, const BirthModel& birth, Time k) {
    auto born = birth_intensity_at(birth, k);
    for (auto& c : born.components) undetected.components.push_back(std::move(c));
}

}  // namespace

TrajectoryMixture predict_mixture_current(const TrajectoryMixture& f, const MotionModel& motion,
                                          Time k, double scale) {
    TrajectoryMixture out;
    out.components.reserve(f.components.size());
    for (const auto& c : f.components) {
        if (c.end_time + 1 != k) {
            throw std::logic_error("predict_current: component does not end at k-1");
        }
        out.components.push_back(MixtureComponent{
            c.weight * scale, c.birth_time, k,
            c.density.predicted(motion.transition(), motion.noise_info())});
    }
    return out;
}

TrajectoryMixture predict_mixture_all(const TrajectoryMixture& f, const MotionModel& motion, Time k,
                                      double dead_component_threshold) {
    const double ps = motion.survival_prob();
    TrajectoryMixture out;
    out.components.reserve(2 * f.components.size());
    for (const auto& c : f.components) {
        if (c.end_time + 1 == k) {
            out.components.push_back(
                MixtureComponent{(1.0 - ps) * c.weight, c.birth_time, c.end_time, c.density});
            out.components.push_back(
                MixtureComponent{ps * c.weight, c.birth_time, k,
                                 c.density.predicted(motion.transition(), motion.noise_info())});
        } else if (c.end_time + 1 < k) {
            if (c.weight >= dead_component_threshold) out.components.push_back(c);
        } else {
            throw std::logic_error("predict_all: component ends after k-1");
        }
    }
    return out;
}

PmbmDensity predict_current(const PmbmDensity& d, const MotionModel& motion,
                            const BirthModel& birth, Time k) {
    check_step(d, k);
    const double ps = motion.survival_prob();
    PmbmDensity out;
    out.time = k;
    out.hypotheses = d.hypotheses;
    out.undetected = predict_mixture_current(d.undetected, motion, k, ps);
    append_birth(out.undetected, birth, k);
    out.tracks.reserve(d.tracks.size());
    for (const auto& track : d.tracks) {
        Track t{track.origin, {}};
        t.leaves.reserve(track.leaves.size());
        for (const auto& leaf : track.leaves) {
            Bernoulli b{leaf.existence * ps, {}, leaf.history, leaf.log_weight};
            b.density = predict_mixture_current(leaf.density, motion, k, 1.0);
            t.leaves.push_back(std::move(b));
        }
        out.tracks.push_back(std::move(t));
    }
    return out;
}

PmbmDensity predict_all(const PmbmDensity& d, const MotionModel& motion, const BirthModel& birth,
                        Time k, const PredictAllOptions& options) {
    check_step(d, k);
    PmbmDensity out;
    out.time = k;
    out.hypotheses = d.hypotheses;
    out.undetected =
        predict_mixture_all(d.undetected, motion, k, options.dead_component_threshold);
    append_birth(out.undetected, birth, k);
    out.tracks.reserve(d.tracks.size());
    for (const auto& track : d.tracks) {
        Track t{track.origin, {}};
        t.leaves.reserve(track.leaves.size());
        for (const auto& leaf : track.leaves) {
            Bernoulli b{leaf.existence, {}, leaf.history, leaf.log_weight};
            b.density =
                predict_mixture_all(leaf.density, motion, k, options.dead_component_threshold);
            // Dropping dead components changes the total; keep it normalized.
            const double total = set_integral_weight(b.density);
            if (total > 0.0 && options.dead_component_threshold > 0.0) {
                for (auto& c : b.density.components) c.weight /= total;
            }
            t.leaves.push_back(std::move(b));
        }
        out.tracks.push_back(std::move(t));
    }
    return out;
}

}  // namespace tpmbm
