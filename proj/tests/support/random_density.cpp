#include "random_density.hpp"

#include <algorithm>
#include <set>

namespace tpmbm::testing {

InfoGaussian random_sequence(TestRng& rng, const MotionModel& motion, std::size_t length) {
    const auto n = static_cast<Eigen::Index>(motion.state_dim());
    InfoGaussian g = InfoGaussian::from_moments(random_vector(rng, n, 10.0), random_spd(rng, n, 5.0));
    const Matrix h = Matrix::Identity(n, n).topRows(std::min<Eigen::Index>(2, n));
    const Matrix ri = Matrix::Identity(h.rows(), h.rows()) / 4.0;
    for (std::size_t t = 1; t < length; ++t) {
        g = g.predicted(motion.transition(), motion.noise_info());
        if (uniform(rng, 0.0, 1.0) < 0.7) g = g.updated(h, ri, random_vector(rng, h.rows(), 10.0));
    }
    return g;
}

TrajectoryMixture random_mixture(TestRng& rng, const MotionModel& motion, Time k, bool current_only,
                                 MixtureKind kind, std::size_t max_components) {
    TrajectoryMixture mix;
    const auto count = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(max_components)));
    std::set<std::pair<Time, Time>> keys;
    for (std::size_t i = 0; i < count; ++i) {
        const Time birth = static_cast<Time>(uniform_int(rng, 0, static_cast<int>(k)));
        const Time end = current_only ? k : static_cast<Time>(uniform_int(rng, static_cast<int>(birth), static_cast<int>(k)));
        if (!keys.insert({birth, end}).second) continue;
        mix.components.push_back(
            MixtureComponent{uniform(rng, 0.05, 1.0), birth, end, random_sequence(rng, motion, end - birth + 1)});
    }
    if (kind == MixtureKind::density) {
        const double total = set_integral_weight(mix);
        for (auto& c : mix.components) c.weight /= total;
    }
    return mix;
}

PmbmDensity random_density(TestRng& rng, const MotionModel& motion, Time k, bool current_only) {
    PmbmDensity d;
    d.time = k;
    d.undetected = random_mixture(rng, motion, k, current_only, MixtureKind::intensity);
    const int num_tracks = uniform_int(rng, 1, 4);
    for (int i = 0; i < num_tracks; ++i) {
        Track t;
        t.origin = MeasurementRef{static_cast<Time>(uniform_int(rng, 0, static_cast<int>(k))), static_cast<std::uint32_t>(i)};
        const int num_leaves = uniform_int(rng, 1, 3);
        for (int l = 0; l < num_leaves; ++l) {
            Bernoulli b;
            b.log_weight = uniform(rng, -5.0, 0.0);
            if (uniform(rng, 0.0, 1.0) < 0.15) {
                b.existence = 0.0;
            } else {
                b.existence = uniform(rng, 0.01, 1.0);
                b.density = random_mixture(rng, motion, k, current_only, MixtureKind::density);
            }
            t.leaves.push_back(std::move(b));
        }
        d.tracks.push_back(std::move(t));
    }
    const int num_hyp = uniform_int(rng, 1, 5);
    for (int h = 0; h < num_hyp; ++h) {
        GlobalHypothesis g;
        g.log_weight = uniform(rng, -3.0, 0.0);
        for (const auto& t : d.tracks) {
            g.leaves.push_back(static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<int>(t.leaves.size()) - 1)));
        }
        d.hypotheses.push_back(std::move(g));
    }
    normalize_hypotheses(d.hypotheses);
    validate_density(d);
    return d;
}

}  // namespace tpmbm::testing
