#include "brute_force_pmbm.hpp"

#include "dense_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tpmbm::testing {

namespace {

struct MassPair {
    double total = 0.0;
    double alive = 0.0;
};

/// Likelihood of a target emitting exactly the chain's measurements.
MassPair target_likelihood(const ModelSet& models, const std::vector<std::vector<Vector>>& frames,
                           const Chain& chain) {
    const Time last = static_cast<Time>(frames.size() - 1);
    const double ps = models.motion.survival_prob();
    const double pd = models.measurement.detection_prob();
    const Matrix& f = models.motion.transition();
    const Matrix& q = models.motion.noise_cov();
    const Matrix& h = models.measurement.obs();
    const Matrix& r = models.measurement.noise_cov();
    MassPair out;
    for (Time b = 0; b <= chain.front().time; ++b) {
        const auto& comps = (b == 0 && !models.birth.initial.empty()) ? models.birth.initial : models.birth.per_step;
        for (const auto& c : comps) {
            Vector m = c.mean;
            Matrix p = c.cov;
            double like = c.weight;
            std::size_t next = 0;
            for (Time t = b; t <= last; ++t) {
                if (t > b) {
                    kalman_predict(m, p, f, q);
                    like *= ps;
                }
                if (next < chain.size() && chain[next].time == t) {
                    const Vector& z = frames[t][chain[next].meas];
                    like *= pd * std::exp(kalman_update(m, p, z, h, r));
                    ++next;
                } else {
                    like *= 1.0 - pd;
                }
                if (next == chain.size()) {
                    // Trajectory ends at t: it dies before t + 1 unless t is the last step.
                    const double end_mass = t < last ? like * (1.0 - ps) : like;
                    out.total += end_mass;
                    if (t == last) out.alive += end_mass;
                }
            }
        }
    }
    return out;
}

}  // namespace

BruteForceResult brute_force_posterior(const ModelSet& models, const std::vector<std::vector<Vector>>& frames) {
    std::vector<MeasurementRef> refs;
    for (Time t = 0; t < frames.size(); ++t) {
        for (std::uint32_t j = 0; j < frames[t].size(); ++j) refs.push_back(MeasurementRef{t, j});
    }
    BruteForceResult out;
    auto chain_posterior = [&](const Chain& chain) -> const ChainPosterior& {
        auto it = out.chains.find(chain);
        if (it != out.chains.end()) return it->second;
        const MassPair mass = target_likelihood(models, frames, chain);
        ChainPosterior post;
        post.target_mass = mass.total;
        post.alive_mass = mass.alive;
        const Vector& z0 = frames[chain.front().time][chain.front().meas];
        post.weight = mass.total + (chain.size() == 1 ? clutter_density(models.clutter, z0) : 0.0);
        return out.chains.emplace(chain, post).first->second;
    };

    std::vector<Chain> chains;
    double total = 0.0;
    std::function<void(std::size_t)> recurse = [&](std::size_t i) {
        if (i == refs.size()) {
            Partition p = chains;
            std::sort(p.begin(), p.end());
            double w = 1.0;
            for (const auto& c : p) w *= chain_posterior(c).weight;
            out.hypothesis_weights[p] += w;
            total += w;
            return;
        }
        const MeasurementRef ref = refs[i];
        chains.push_back(Chain{ref});
        recurse(i + 1);
        chains.pop_back();
        for (auto& c : chains) {
            if (c.back().time < ref.time) {
                c.push_back(ref);
                recurse(i + 1);
                c.pop_back();
            }
        }
    };
    recurse(0);
    for (auto& [p, w] : out.hypothesis_weights) w /= total;
    return out;
}

Partition partition_of(const PmbmDensity& d, const GlobalHypothesis& h) {
    Partition p;
    for (std::size_t i = 0; i < d.tracks.size(); ++i) {
        const auto entries = d.tracks[i].leaves[h.leaves[i]].history.entries();
        if (!entries.empty()) p.push_back(entries);
    }
    std::sort(p.begin(), p.end());
    return p;
}

}  // namespace tpmbm::testing
