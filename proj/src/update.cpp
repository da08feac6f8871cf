#include "tpmbm/update.hpp"

#include "tpmbm/association.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace tpmbm {

namespace {

// Cost standing in for a zero-weight event that must stay selectable (a
// measurement with no feasible origin, or a track that cannot be missed).
// Used for ranking only; the exact child weights are recomputed afterwards.
constexpr double kImpossibleCost = 1e6;

// Predicted-measurement statistics of one live mixture component.
struct LiveComponent {
    std::size_t index;
    double log_weight;
    Vector predicted_z;
    Eigen::LLT<Matrix> innovation;
    double log_norm;

    [[nodiscard]] double mahalanobis(const Vector& z) const {
        return innovation.matrixL().solve(z - predicted_z).squaredNorm();
    }
    [[nodiscard]] double log_likelihood(const Vector& z) const {
        return log_norm - 0.5 * mahalanobis(z);
    }
};

std::vector<LiveComponent> prepare_live(const TrajectoryMixture& f, const MeasurementModel& meas,
                                        Time k) {
    std::vector<LiveComponent> out;
    const double nz = static_cast<double>(meas.meas_dim());
    for (std::size_t i = 0; i < f.components.size(); ++i) {
        const auto& c = f.components[i];
        if (c.end_time != k || !(c.weight > 0.0)) continue;
        const auto m = c.density.last_step_marginal();
        const Matrix s =
            symmetrized(meas.obs() * m.cov * meas.obs().transpose() + meas.noise_cov());
        LiveComponent lc{i, std::log(c.weight), meas.obs() * m.mean,
                         checked_cholesky(s, "innovation covariance"), 0.0};
        const Matrix& l = lc.innovation.matrixLLT();
        double log_det = 0.0;
        for (Eigen::Index r = 0; r < l.rows(); ++r) log_det += 2.0 * std::log(l(r, r));
        lc.log_norm = -0.5 * (nz * std::log(2.0 * std::numbers::pi) + log_det);
        out.push_back(std::move(lc));
    }
    return out;
}

// Heaviest live component; lowest index wins ties.
const LiveComponent* heaviest(const std::vector<LiveComponent>& live) {
    const LiveComponent* best = nullptr;
    for (const auto& lc : live) {
        if (best == nullptr || lc.log_weight > best->log_weight) best = &lc;
    }
    return best;
}

DetectUpdate detect_prepared(const TrajectoryMixture& f, const std::vector<LiveComponent>& live,
                             const MeasurementModel& meas, const Vector& z) {
    DetectUpdate out;
    if (live.empty() || !(meas.detection_prob() > 0.0)) return out;
    std::vector<double> terms;
    terms.reserve(live.size());
    const double log_pd = std::log(meas.detection_prob());
    for (const auto& lc : live) terms.push_back(lc.log_weight + log_pd + lc.log_likelihood(z));
    out.log_likelihood = log_sum_exp(terms);
    if (out.log_likelihood == kNegInf) return out;
    for (std::size_t i = 0; i < live.size(); ++i) {
        const auto& c = f.components[live[i].index];
        const double w = std::exp(terms[i] - out.log_likelihood);
        out.posterior.components.push_back(MixtureComponent{
            w, c.birth_time, c.end_time, c.density.updated(meas.obs(), meas.noise_info(), z)});
    }
    return out;
}

Bernoulli placeholder() { return Bernoulli{0.0, {}, {}, kNegInf}; }

}  // namespace

MissUpdate mixture_miss_update(const TrajectoryMixture& f, double detection_prob, Time k) {
    if (!(detection_prob >= 0.0 && detection_prob <= 1.0)) {
        throw std::invalid_argument("mixture_miss_update: detection probability outside [0, 1]");
    }
    MissUpdate out;
    out.posterior = f;
    for (auto& c : out.posterior.components) {
        if (c.end_time == k) c.weight *= 1.0 - detection_prob;
        out.mass += c.weight;
    }
    if (out.mass > 0.0) {
        for (auto& c : out.posterior.components) c.weight /= out.mass;
    } else {
        out.posterior = f;
    }
    return out;
}

DetectUpdate mixture_detect_update(const TrajectoryMixture& f, const MeasurementModel& meas,
                                   const Vector& z, Time k) {
    if (z.size() != static_cast<Eigen::Index>(meas.meas_dim())) {
        throw std::invalid_argument("mixture_detect_update: measurement dimension mismatch");
    }
    return detect_prepared(f, prepare_live(f, meas, k), meas, z);
}

PmbmDensity update(const PmbmDensity& d, const std::vector<Vector>& measurements,
                   const MeasurementModel& meas, const ClutterModel& clutter, Time k,
                   const UpdateOptions& options) {
    if (d.time != k) throw std::invalid_argument("update: density time must equal k");
    for (const auto& z : measurements) {
        if (z.size() != static_cast<Eigen::Index>(meas.meas_dim())) {
            throw std::invalid_argument("update: measurement dimension mismatch");
        }
    }
    const std::size_t m = measurements.size();
    const std::size_t n = d.tracks.size();
    const double pd = meas.detection_prob();
    const bool gating = !options.exact && options.gate_threshold < kInf;

    PmbmDensity out;
    out.time = k;
    out.undetected = d.undetected;
    for (auto& c : out.undetected.components) {
        if (c.end_time == k) c.weight *= 1.0 - pd;
    }

    // Continuing tracks. miss_delta[i][l] and det_delta[i][l][j] are the log
    // weight ratios of the children against prior leaf l.
    std::vector<std::vector<double>> miss_delta(n);
    std::vector<std::vector<std::vector<double>>> det_delta(n);
    out.tracks.reserve(n + m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& prior = d.tracks[i];
        const std::size_t h = prior.leaves.size();
        Track t{prior.origin, std::vector<Bernoulli>(h * (1 + m), placeholder())};
        miss_delta[i].resize(h);
        det_delta[i].assign(h, std::vector<double>(m, kNegInf));
        for (std::size_t l = 0; l < h; ++l) {
            const auto& leaf = prior.leaves[l];
            if (!(leaf.existence > 0.0)) {
                t.leaves[l] = leaf;
                miss_delta[i][l] = 0.0;
                continue;
            }
            const double live = live_weight(leaf.density, k);
            const double q = 1.0 - leaf.existence * pd * live;
            auto miss = mixture_miss_update(leaf.density, pd, k);
            Bernoulli& missed = t.leaves[l];
            missed.history = leaf.history;
            if (q > 0.0) {
                missed.existence = std::min(1.0, leaf.existence * miss.mass / q);
                missed.density = std::move(miss.posterior);
                missed.log_weight = leaf.log_weight + std::log(q);
                miss_delta[i][l] = std::log(q);
            } else {
                missed.existence = 0.0;
                missed.log_weight = kNegInf;
                miss_delta[i][l] = kNegInf;
            }
            if (!(pd > 0.0) || m == 0) continue;
            const auto live_components = prepare_live(leaf.density, meas, k);
            const LiveComponent* gate_component = heaviest(live_components);
            for (std::size_t j = 0; j < m; ++j) {
                const Vector& z = measurements[j];
                if (gate_component == nullptr) break;
                if (gating && gate_component->mahalanobis(z) > options.gate_threshold) continue;
                auto det = detect_prepared(leaf.density, live_components, meas, z);
                if (det.log_likelihood == kNegInf) continue;
                Bernoulli& b = t.leaves[l + h * (j + 1)];
                b.existence = 1.0;
                b.density = std::move(det.posterior);
                b.history = leaf.history.extended(MeasurementRef{k, static_cast<std::uint32_t>(j)});
                det_delta[i][l][j] = std::log(leaf.existence) + det.log_likelihood;
                b.log_weight = leaf.log_weight + det_delta[i][l][j];
            }
        }
        out.tracks.push_back(std::move(t));
    }

    // New tracks, one per measurement unless clutter-dominated.
    const auto undetected_live = prepare_live(d.undetected, meas, k);
    std::vector<double> new_log_weight(m, kNegInf);
    std::vector<std::int64_t> new_track_index(m, -1);
    for (std::size_t j = 0; j < m; ++j) {
        const Vector& z = measurements[j];
        auto det = detect_prepared(d.undetected, undetected_live, meas, z);
        const double lambda_fa = clutter_density(clutter, z);
        const double log_fa = lambda_fa > 0.0 ? std::log(lambda_fa) : kNegInf;
        new_log_weight[j] = log_add(log_fa, det.log_likelihood);
        bool create = true;
        if (!options.exact) {
            if (det.log_likelihood == kNegInf) create = false;
            else if (lambda_fa > 0.0) {
                create = new_log_weight[j] - log_fa >= std::log1p(options.new_track_floor);
            }
        }
        if (!create) continue;
        Bernoulli exists;
        exists.log_weight = new_log_weight[j];
        exists.history = AssocHistory{}.extended(MeasurementRef{k, static_cast<std::uint32_t>(j)});
        if (det.log_likelihood > kNegInf) {
            exists.existence = std::min(1.0, std::exp(det.log_likelihood - new_log_weight[j]));
            exists.density = std::move(det.posterior);
        }
        Track t{MeasurementRef{k, static_cast<std::uint32_t>(j)},
                {Bernoulli{0.0, {}, {}, 0.0}, std::move(exists)}};
        new_track_index[j] = static_cast<std::int64_t>(out.tracks.size());
        out.tracks.push_back(std::move(t));
    }

    // One assignment problem per parent hypothesis.
    std::vector<AssignmentProblem> problems;
    problems.reserve(d.hypotheses.size());
    for (std::size_t p = 0; p < d.hypotheses.size(); ++p) {
        const auto& parent = d.hypotheses[p];
        if (parent.log_weight == kNegInf) continue;
        AssignmentProblem prob;
        prob.parent = p;
        prob.num_tracks = n;
        prob.base_log_weight = parent.log_weight;
        prob.cost = Matrix::Constant(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n + m), kInf);
        for (std::size_t i = 0; i < n; ++i) {
            const auto l = parent.leaves[i];
            const double dm = std::max(miss_delta[i][l], -kImpossibleCost);
            prob.base_log_weight += dm;
            for (std::size_t j = 0; j < m; ++j) {
                const double dd = det_delta[i][l][j];
                if (dd > kNegInf) {
                    prob.cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -(dd - dm);
                }
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double w = new_log_weight[j];
            prob.cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n + j)) =
                w > kNegInf ? -w : kImpossibleCost;
        }
        problems.push_back(std::move(prob));
    }
    const std::size_t k_best =
        options.exact ? std::numeric_limits<std::size_t>::max() : options.k_best;
    const auto children = k_best_global(problems, k_best, options.exact ? 0 : options.max_children);

    std::map<std::vector<std::uint32_t>, double> merged;
    std::vector<std::vector<std::uint32_t>> order;
    for (const auto& child : children) {
        const auto& parent = d.hypotheses[child.parent];
        std::vector<std::uint32_t> leaves(out.tracks.size());
        double lw = parent.log_weight;
        std::vector<std::int64_t> assigned_row(n, -1);
        for (std::size_t j = 0; j < m; ++j) {
            const int col = child.columns[j];
            if (col < static_cast<int>(n)) {
                assigned_row[static_cast<std::size_t>(col)] = static_cast<std::int64_t>(j);
            } else {
                lw += new_log_weight[j];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t h = d.tracks[i].leaves.size();
            const std::size_t l = parent.leaves[i];
            const std::size_t c = l + h * static_cast<std::size_t>(assigned_row[i] + 1);
            leaves[i] = static_cast<std::uint32_t>(c);
            lw += out.tracks[i].leaves[c].log_weight - d.tracks[i].leaves[l].log_weight;
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (new_track_index[j] < 0) continue;
            const bool detected = child.columns[j] == static_cast<int>(n + j);
            leaves[static_cast<std::size_t>(new_track_index[j])] = detected ? 1u : 0u;
        }
        if (!(lw > kNegInf)) continue;
        auto [it, inserted] = merged.emplace(leaves, lw);
        if (inserted) order.push_back(std::move(leaves));
        else it->second = log_add(it->second, lw);
    }
    if (order.empty()) {
        throw std::runtime_error("update: measurements have zero likelihood under every hypothesis");
    }
    for (auto& leaves : order) out.hypotheses.push_back(GlobalHypothesis{merged[leaves], leaves});
    std::stable_sort(out.hypotheses.begin(), out.hypotheses.end(),
                     [](const GlobalHypothesis& a, const GlobalHypothesis& b) {
                         if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
                         return a.leaves < b.leaves;
                     });
    normalize_hypotheses(out.hypotheses);
    return out;
}

}  // namespace tpmbm
