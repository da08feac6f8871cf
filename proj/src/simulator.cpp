#include "tpmbm/simulator.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <stdexcept>

namespace tpmbm {

namespace {

int poisson(Rng& rng, double mean) {
    if (!(mean > 0.0)) return 0;
    return boost::random::poisson_distribution<int, double>(mean)(rng);
}

bool coin(Rng& rng, double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return boost::random::bernoulli_distribution<double>(p)(rng);
}

Vector sample_birth(Rng& rng, const std::vector<BirthComponent>& comps) {
    std::vector<double> w;
    for (const auto& c : comps) w.push_back(c.weight);
    const auto idx = boost::random::discrete_distribution<std::size_t, double>(w.begin(), w.end())(rng);
    return sample_gaussian(rng, comps[idx].mean, comps[idx].cov);
}

double total_weight(const std::vector<BirthComponent>& comps) {
    double s = 0.0;
    for (const auto& c : comps) s += c.weight;
    return s;
}

}  // namespace

Vector sample_gaussian(Rng& rng, const Vector& mean, const Matrix& cov) {
    Eigen::LLT<Matrix> llt(symmetrized(cov));
    Matrix l;
    if (llt.info() == Eigen::Success) {
        l = llt.matrixL();
    } else {
        // Semi-definite covariance: fall back to a symmetric square root.
        Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(cov));
        l = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    Vector w(mean.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(rng);
    return mean + l * w;
}

void ScenarioSpec::validate(const ModelSet& models) const {
    const auto nx = static_cast<Eigen::Index>(models.motion.state_dim());
    if (duration == 0) throw std::invalid_argument("scenario: duration must be positive");
    for (const auto& t : scripted) {
        if (t.birth_time > t.end_time || t.end_time >= duration) {
            throw std::invalid_argument("scenario: scripted target lifespan outside the scenario");
        }
        if (t.initial_state.size() != nx) {
            throw std::invalid_argument("scenario: scripted initial state has the wrong dimension");
        }
    }
    for (const auto& t : waypoint_targets) {
        if (t.birth_time > t.end_time || t.end_time >= duration) {
            throw std::invalid_argument("scenario: waypoint target lifespan outside the scenario");
        }
        if (t.times.size() < 2 || t.times.size() != t.positions.size()) {
            throw std::invalid_argument("scenario: a waypoint target needs at least two waypoints");
        }
        for (std::size_t i = 1; i < t.times.size(); ++i) {
            if (!(t.times[i] > t.times[i - 1])) {
                throw std::invalid_argument("scenario: waypoint times must increase");
            }
        }
        if (nx != 4) throw std::invalid_argument("scenario: waypoint targets need a 4-D state");
    }
    if (kind == TruthKind::stochastic && models.birth.per_step.empty() && models.birth.initial.empty()) {
        throw std::invalid_argument("scenario: stochastic truth needs a birth model");
    }
}

Trajectory waypoint_trajectory(const WaypointTarget& target) {
    const auto& ts = target.times;
    const auto& ps = target.positions;
    const std::size_t n = ts.size();
    std::vector<Eigen::Vector2d> tangent(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        tangent[i] = (ps[hi] - ps[lo]) / (ts[hi] - ts[lo]);
    }
    Trajectory out;
    out.birth_time = target.birth_time;
    out.end_time = target.end_time;
    for (Time k = target.birth_time; k <= target.end_time; ++k) {
        const double t = std::clamp(static_cast<double>(k), ts.front(), ts.back());
        std::size_t seg = 0;
        while (seg + 2 < n && t > ts[seg + 1]) ++seg;
        const double h = ts[seg + 1] - ts[seg];
        const double u = (t - ts[seg]) / h;
        const double u2 = u * u;
        const double u3 = u2 * u;
        const Eigen::Vector2d pos = (2 * u3 - 3 * u2 + 1) * ps[seg] + (u3 - 2 * u2 + u) * h * tangent[seg] +
                                    (-2 * u3 + 3 * u2) * ps[seg + 1] + (u3 - u2) * h * tangent[seg + 1];
        const Eigen::Vector2d vel = ((6 * u2 - 6 * u) * ps[seg] + (3 * u2 - 4 * u + 1) * h * tangent[seg] +
                                     (-6 * u2 + 6 * u) * ps[seg + 1] + (3 * u2 - 2 * u) * h * tangent[seg + 1]) /
                                    h;
        Vector x(4);
        x << pos, vel;
        out.states.push_back(x);
    }
    return out;
}

SimulationOutput simulate(const ScenarioSpec& spec, const ModelSet& models, std::uint64_t seed) {
    spec.validate(models);
    Rng rng(seed);
    SimulationOutput out;
    const auto& motion = models.motion;
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(motion.state_dim()));

    switch (spec.kind) {
        case TruthKind::waypoints:
            for (const auto& t : spec.waypoint_targets) out.truth.push_back(waypoint_trajectory(t));
            break;
        case TruthKind::scripted:
            for (const auto& t : spec.scripted) {
                Trajectory tr{t.birth_time, t.end_time, {t.initial_state}};
                for (Time k = t.birth_time + 1; k <= t.end_time; ++k) {
                    tr.states.push_back(motion.transition() * tr.states.back() +
                                        sample_gaussian(rng, zero, motion.noise_cov()));
                }
                out.truth.push_back(std::move(tr));
            }
            break;
        case TruthKind::stochastic: {
            std::vector<char> alive;
            for (Time k = 0; k < spec.duration; ++k) {
                if (k > 0) {
                    for (std::size_t i = 0; i < out.truth.size(); ++i) {
                        if (!alive[i]) continue;
                        if (!coin(rng, motion.survival_prob())) {
                            alive[i] = 0;
                            continue;
                        }
                        auto& tr = out.truth[i];
                        tr.states.push_back(motion.transition() * tr.states.back() +
                                            sample_gaussian(rng, zero, motion.noise_cov()));
                        tr.end_time = k;
                    }
                }
                const auto& comps = (k == 0 && !models.birth.initial.empty()) ? models.birth.initial
                                                                               : models.birth.per_step;
                const int births = poisson(rng, total_weight(comps));
                for (int b = 0; b < births; ++b) {
                    out.truth.push_back(Trajectory{k, k, {sample_birth(rng, comps)}});
                    alive.push_back(1);
                }
            }
            break;
        }
    }

    const auto& meas = models.measurement;
    const auto& clutter = models.clutter;
    const Vector zero_z = Vector::Zero(static_cast<Eigen::Index>(meas.meas_dim()));
    out.frames.resize(spec.duration);
    out.origins.resize(spec.duration);
    for (Time k = 0; k < spec.duration; ++k) {
        auto& frame = out.frames[k];
        auto& origin = out.origins[k];
        for (std::size_t i = 0; i < out.truth.size(); ++i) {
            const auto& tr = out.truth[i];
            if (!tr.exists_at(k) || !coin(rng, meas.detection_prob())) continue;
            frame.push_back(meas.obs() * tr.state_at(k) + sample_gaussian(rng, zero_z, meas.noise_cov()));
            origin.push_back(static_cast<int>(i));
        }
        const int num_clutter = poisson(rng, clutter.expected_count());
        for (int c = 0; c < num_clutter; ++c) {
            Vector z(zero_z.size());
            for (Eigen::Index d = 0; d < z.size(); ++d) {
                const auto di = static_cast<std::size_t>(d);
                z(d) = boost::random::uniform_real_distribution<double>(clutter.lower[di], clutter.upper[di])(rng);
            }
            frame.push_back(z);
            origin.push_back(-1);
        }
        // Fisher-Yates with a portable index distribution.
        for (std::size_t i = frame.size(); i > 1; --i) {
            const auto j = boost::random::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
            std::swap(frame[i - 1], frame[j]);
            std::swap(origin[i - 1], origin[j]);
        }
    }
    return out;
}

}  // namespace tpmbm
