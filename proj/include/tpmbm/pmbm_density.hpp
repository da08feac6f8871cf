#pragma once

#include "tpmbm/trajectory.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace tpmbm {

/// A measurement reference: index `meas` into the measurement list of time `time`.
struct MeasurementRef {
    Time time = 0;
    std::uint32_t meas = 0;

    friend bool operator==(const MeasurementRef&, const MeasurementRef&) = default;
    friend auto operator<=>(const MeasurementRef&, const MeasurementRef&) = default;
};

/// Measurement-association history of a single-trajectory hypothesis.
///
/// Stored as a persistent linked list so that the (1 + m) children created by
/// an update share their parent's history.
class AssocHistory {
public:
    AssocHistory() = default;

    [[nodiscard]] AssocHistory extended(MeasurementRef ref) const;
    [[nodiscard]] std::size_t size() const { return head_ ? head_->size : 0; }
    [[nodiscard]] bool empty() const { return !head_; }
    /// Entries, oldest first.
    [[nodiscard]] std::vector<MeasurementRef> entries() const;

    static AssocHistory from_entries(const std::vector<MeasurementRef>& entries);

private:
    struct Node {
        MeasurementRef ref;
        std::size_t size;
        std::shared_ptr<const Node> prev;
    };
    std::shared_ptr<const Node> head_;
};

/// Single-trajectory hypothesis: a trajectory Bernoulli with its weight.
struct Bernoulli {
    double existence = 0.0;
    TrajectoryMixture density;  ///< normalized; may be empty when existence is 0
    AssocHistory history;
    double log_weight = 0.0;
};

/// Hypothesis tree of one track, rooted at the measurement that started it.
struct Track {
    MeasurementRef origin;
    std::vector<Bernoulli> leaves;
};

/// One leaf per track, plus the hypothesis weight in log domain.
struct GlobalHypothesis {
    double log_weight = 0.0;
    std::vector<std::uint32_t> leaves;
};

/// Trajectory PMBM: PPP intensity of undetected trajectories plus a
/// multi-Bernoulli mixture given by tracks and global hypotheses.
struct PmbmDensity {
    Time time = 0;
    TrajectoryMixture undetected;
    std::vector<Track> tracks;
    std::vector<GlobalHypothesis> hypotheses;

    /// Density with no tracks and a single empty global hypothesis.
    static PmbmDensity with_undetected(TrajectoryMixture undetected, Time time);
};

/// Log-sum-exp of the hypothesis log weights.
double log_normalizer(const std::vector<GlobalHypothesis>& hypotheses);

/// Shifts log weights so that their exponentials sum to one.
void normalize_hypotheses(std::vector<GlobalHypothesis>& hypotheses);

/// Index of the highest-weight hypothesis (lowest index wins ties).
std::size_t best_hypothesis(const PmbmDensity& d);

/// Throws std::invalid_argument if the structural invariants fail.
void validate_density(const PmbmDensity& d);

/// Expected number of trajectories alive at d.time.
double expected_live_count(const PmbmDensity& d);

/// Stable stacking of log weights: log(sum exp(v)).
double log_sum_exp(const std::vector<double>& v);
double log_add(double a, double b);

/// Single-time Gaussian mixture component.
struct TargetComponent {
    double weight = 0.0;
    Moments moments;
};

/// Target Bernoulli (existence plus a normalized single-time mixture).
struct TargetBernoulli {
    double existence = 0.0;
    std::vector<TargetComponent> density;
};

/// Moment-matched single Gaussian of a normalized mixture.
Moments collapse(const std::vector<TargetComponent>& mixture);

/// Marginalizes a trajectory Bernoulli to the target Bernoulli at time k:
/// existence r times the weight ending at k, density the weighted final-step
/// marginals of those components.
TargetBernoulli marginalize_to_target(const Bernoulli& b, Time k, bool collapse_mixture = false);

}  // namespace tpmbm
