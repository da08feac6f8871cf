#pragma once

#include "tpmbm/info_gaussian.hpp"
#include "tpmbm/types.hpp"

#include <vector>

namespace tpmbm {

/// A single trajectory (birth time, end time, state sequence).
struct Trajectory {
    Time birth_time = 0;
    Time end_time = 0;
    std::vector<Vector> states;  ///< one state per step in [birth_time, end_time]

    [[nodiscard]] std::size_t length() const { return states.size(); }
    [[nodiscard]] bool exists_at(Time t) const { return t >= birth_time && t <= end_time; }
    /// State at absolute time t; t must lie inside the trajectory's span.
    [[nodiscard]] const Vector& state_at(Time t) const { return states.at(t - birth_time); }

    /// Throws std::invalid_argument if the invariants do not hold.
    void validate() const;
};

/// Restriction of a trajectory to times <= k. Returns false if it starts after k.
bool restrict_to(const Trajectory& in, Time k, Trajectory& out);

/// One (birth, end) component of a trajectory mixture.
///
/// The sequence density normally covers every step of [birth_time, end_time].
/// When window truncation is active it only covers the most recent steps, so
/// its length may be shorter than the span.
struct MixtureComponent {
    double weight = 0.0;  ///< linear weight
    Time birth_time = 0;
    Time end_time = 0;
    InfoGaussian density;

    /// First time covered by the sequence density.
    [[nodiscard]] Time first_stored_time() const {
        return end_time + 1 - static_cast<Time>(density.length());
    }
};

/// Weighted mixture over distinct (birth, end) pairs. The same type stores a
/// normalized Bernoulli density and an unnormalized PPP intensity.
struct TrajectoryMixture {
    std::vector<MixtureComponent> components;

    [[nodiscard]] bool empty() const { return components.empty(); }
    [[nodiscard]] std::size_t size() const { return components.size(); }
};

enum class MixtureKind { density, intensity };

/// Total mixture weight (each Gaussian integrates to one).
double set_integral_weight(const TrajectoryMixture& mixture);

/// Weight of the components whose end time equals k.
double live_weight(const TrajectoryMixture& mixture, Time k);

/// Drops components below `weight_threshold`, then keeps the `max_components`
/// heaviest (0 means no cap). Densities are renormalized; intensities keep
/// their weights. Order of the surviving components is preserved.
TrajectoryMixture prune_mixture(const TrajectoryMixture& mixture, double weight_threshold,
                                std::size_t max_components, MixtureKind kind);

/// Checks the mixture invariants: nonnegative weights, birth <= end, sequence
/// lengths within the span, unit total weight for densities.
void validate_mixture(const TrajectoryMixture& mixture, MixtureKind kind);

/// True if no two components share a (birth, end) pair. This holds for every
/// mixture the recursions produce when the birth model has one component per
/// step; several birth components per step share the key (k, k).
bool has_distinct_keys(const TrajectoryMixture& mixture);

/// Index of the heaviest component; lowest index wins ties. Requires a
/// nonempty mixture.
std::size_t heaviest_component(const TrajectoryMixture& mixture);

}  // namespace tpmbm
