#include "tpmbm/estimation.hpp"

namespace tpmbm {

Trajectory component_trajectory(const MixtureComponent& c) {
    Trajectory t;
    t.birth_time = c.first_stored_time();
    t.end_time = c.end_time;
    const Vector mean = c.density.mean();
    const auto n = static_cast<Eigen::Index>(c.density.state_dim());
    t.states.reserve(c.density.length());
    for (std::size_t s = 0; s < c.density.length(); ++s) {
        t.states.push_back(mean.segment(static_cast<Eigen::Index>(s) * n, n));
    }
    return t;
}

std::vector<TrajectoryEstimate> extract_estimates(const PmbmDensity& d, double r_threshold) {
    std::vector<TrajectoryEstimate> out;
    if (d.hypotheses.empty()) return out;
    const auto& best = d.hypotheses[best_hypothesis(d)];
    for (std::size_t i = 0; i < d.tracks.size(); ++i) {
        const auto& leaf = d.tracks[i].leaves[best.leaves[i]];
        if (!(leaf.existence >= r_threshold) || !(leaf.existence > 0.0) || leaf.density.empty()) {
            continue;
        }
        const auto& c = leaf.density.components[heaviest_component(leaf.density)];
        out.push_back(TrajectoryEstimate{d.tracks[i].origin, i, leaf.existence,
                                         leaf.history.entries(), component_trajectory(c)});
    }
    return out;
}

std::vector<Trajectory> extract_trajectories(const PmbmDensity& d, double r_threshold) {
    std::vector<Trajectory> out;
    for (auto& e : extract_estimates(d, r_threshold)) out.push_back(std::move(e.trajectory));
    return out;
}

TargetPmbm marginalize_density(const PmbmDensity& d, Time k) {
    TargetPmbm out;
    out.time = k;
    for (const auto& c : d.undetected.components) {
        if (c.end_time == k) {
            out.undetected.push_back(TargetComponent{c.weight, c.density.last_step_marginal()});
        }
    }
    out.tracks.reserve(d.tracks.size());
    for (const auto& t : d.tracks) {
        std::vector<TargetLeaf> leaves;
        leaves.reserve(t.leaves.size());
        for (const auto& leaf : t.leaves) {
            leaves.push_back(TargetLeaf{marginalize_to_target(leaf, k), leaf.log_weight});
        }
        out.tracks.push_back(std::move(leaves));
    }
    out.hypotheses = d.hypotheses;
    return out;
}

}  // namespace tpmbm
