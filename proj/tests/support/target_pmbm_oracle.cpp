#include "target_pmbm_oracle.hpp"

#include "dense_gaussian.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tpmbm::testing {

namespace {

double lse(const std::vector<double>& v) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

std::vector<OracleComponent> marginal_components(const TrajectoryMixture& mix, Time k, double& live) {
    std::vector<OracleComponent> out;
    live = 0.0;
    for (const auto& c : mix.components) {
        if (c.end_time != k) continue;
        const Moments mo = c.density.last_step_marginal();
        out.push_back(OracleComponent{c.weight, mo.mean, mo.cov});
        live += c.weight;
    }
    return out;
}

}  // namespace

OraclePmbm oracle_from_tracker(const PmbmDensity& d) {
    OraclePmbm o;
    o.time = d.time;
    double unused = 0.0;
    o.undetected = marginal_components(d.undetected, d.time, unused);
    for (const auto& track : d.tracks) {
        std::vector<OracleLeaf> leaves;
        for (const auto& leaf : track.leaves) {
            double live = 0.0;
            OracleLeaf ol;
            ol.log_weight = leaf.log_weight;
            ol.density = marginal_components(leaf.density, d.time, live);
            ol.existence = leaf.existence * live;
            if (live > 0.0) {
                for (auto& c : ol.density) c.weight /= live;
            } else {
                ol.density.clear();
            }
            leaves.push_back(std::move(ol));
        }
        o.tracks.push_back(std::move(leaves));
    }
    std::vector<double> lw;
    for (const auto& h : d.hypotheses) lw.push_back(h.log_weight);
    const double norm = lse(lw);
    for (const auto& h : d.hypotheses) {
        auto [it, inserted] = o.hypotheses.emplace(h.leaves, h.log_weight - norm);
        if (!inserted) it->second = lse({it->second, h.log_weight - norm});
    }
    return o;
}

OraclePmbm oracle_step(const OraclePmbm& prior, const ModelSet& models, const std::vector<Vector>& z, Time k) {
    const double ps = models.motion.survival_prob();
    const double pd = models.measurement.detection_prob();
    const Matrix& f = models.motion.transition();
    const Matrix& q = models.motion.noise_cov();
    const Matrix& h = models.measurement.obs();
    const Matrix& r = models.measurement.noise_cov();
    const std::size_t m = z.size();

    // Prediction.
    OraclePmbm pred = prior;
    pred.time = k;
    auto predict_components = [&](std::vector<OracleComponent>& comps) {
        for (auto& c : comps) kalman_predict(c.mean, c.cov, f, q);
    };
    for (auto& c : pred.undetected) c.weight *= ps;
    predict_components(pred.undetected);
    const auto& births = (k == 0 && !models.birth.initial.empty()) ? models.birth.initial : models.birth.per_step;
    for (const auto& b : births) pred.undetected.push_back(OracleComponent{b.weight, b.mean, b.cov});
    for (auto& track : pred.tracks) {
        for (auto& leaf : track) {
            leaf.existence *= ps;
            predict_components(leaf.density);
        }
    }

    // Leaf updates.
    OraclePmbm post;
    post.time = k;
    for (const auto& c : pred.undetected) post.undetected.push_back(OracleComponent{(1.0 - pd) * c.weight, c.mean, c.cov});
    for (const auto& track : pred.tracks) {
        const std::size_t hcount = track.size();
        std::vector<OracleLeaf> children(hcount * (1 + m));
        for (std::size_t l = 0; l < hcount; ++l) {
            const OracleLeaf& leaf = track[l];
            OracleLeaf& miss = children[l];
            const double qmiss = 1.0 - leaf.existence * pd;
            miss.existence = leaf.existence * (1.0 - pd) / qmiss;
            miss.log_weight = leaf.log_weight + std::log(qmiss);
            miss.density = leaf.density;
            for (std::size_t j = 0; j < m; ++j) {
                OracleLeaf& det = children[l + hcount * (j + 1)];
                if (leaf.existence <= 0.0 || leaf.density.empty()) {
                    det.existence = 0.0;
                    det.log_weight = kNegInf;
                    continue;
                }
                std::vector<double> terms;
                std::vector<OracleComponent> comps;
                for (const auto& c : leaf.density) {
                    OracleComponent u = c;
                    const double ll = kalman_update(u.mean, u.cov, z[j], h, r);
                    terms.push_back(std::log(c.weight) + ll);
                    comps.push_back(std::move(u));
                }
                const double total = lse(terms);
                for (std::size_t i = 0; i < comps.size(); ++i) comps[i].weight = std::exp(terms[i] - total);
                det.existence = 1.0;
                det.log_weight = leaf.log_weight + std::log(leaf.existence) + std::log(pd) + total;
                det.density = std::move(comps);
            }
        }
        post.tracks.push_back(std::move(children));
    }
    const std::size_t num_old = pred.tracks.size();
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> terms;
        std::vector<OracleComponent> comps;
        for (const auto& c : pred.undetected) {
            OracleComponent u = c;
            const double ll = kalman_update(u.mean, u.cov, z[j], h, r);
            terms.push_back(std::log(pd * c.weight) + ll);
            comps.push_back(std::move(u));
        }
        const double log_t = lse(terms);
        const double lambda = clutter_density(models.clutter, z[j]);
        const double log_total = lse({std::log(lambda), log_t});
        for (std::size_t i = 0; i < comps.size(); ++i) comps[i].weight = std::exp(terms[i] - log_t);
        OracleLeaf absent{0.0, 0.0, {}};
        OracleLeaf detected{std::exp(log_t - log_total), log_total, std::move(comps)};
        post.tracks.push_back({absent, detected});
    }

    // Global hypotheses: every assignment of measurements to distinct tracks or to their own new track.
    std::map<std::vector<std::uint32_t>, double> raw;
    for (const auto& [leaves, parent_lw] : prior.hypotheses) {
        std::vector<int> assigned(m, -1);  // track index or -1 for the new track
        std::vector<bool> used(num_old, false);
        std::function<void(std::size_t)> recurse = [&](std::size_t j) {
            if (j == m) {
                std::vector<std::uint32_t> child(num_old + m);
                double lw = parent_lw;
                for (std::size_t i = 0; i < num_old; ++i) {
                    std::size_t col = 0;
                    for (std::size_t jj = 0; jj < m; ++jj) {
                        if (assigned[jj] == static_cast<int>(i)) col = jj + 1;
                    }
                    const std::size_t hcount = pred.tracks[i].size();
                    const std::size_t idx = leaves[i] + hcount * col;
                    child[i] = static_cast<std::uint32_t>(idx);
                    lw += post.tracks[i][idx].log_weight - prior.tracks[i][leaves[i]].log_weight;
                }
                for (std::size_t jj = 0; jj < m; ++jj) {
                    const std::uint32_t leaf = assigned[jj] < 0 ? 1u : 0u;
                    child[num_old + jj] = leaf;
                    lw += post.tracks[num_old + jj][leaf].log_weight;
                }
                if (lw == kNegInf) return;
                auto [it, inserted] = raw.emplace(child, lw);
                if (!inserted) it->second = lse({it->second, lw});
                return;
            }
            assigned[j] = -1;
            recurse(j + 1);
            for (std::size_t i = 0; i < num_old; ++i) {
                if (used[i]) continue;
                used[i] = true;
                assigned[j] = static_cast<int>(i);
                recurse(j + 1);
                used[i] = false;
            }
            assigned[j] = -1;
        };
        recurse(0);
    }
    std::vector<double> all;
    for (const auto& [key, lw] : raw) all.push_back(lw);
    const double norm = lse(all);
    for (const auto& [key, lw] : raw) post.hypotheses.emplace(key, lw - norm);
    return post;
}

OracleComparison compare(const OraclePmbm& oracle, const OraclePmbm& tracker) {
    OracleComparison out;
    auto fail = [&](const std::string& msg) {
        if (out.structure_ok) out.message = msg;
        out.structure_ok = false;
    };
    auto compare_components = [&](const std::vector<OracleComponent>& a, const std::vector<OracleComponent>& b) {
        if (a.size() != b.size()) {
            fail("component count differs");
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            out.weight_error = std::max(out.weight_error, std::abs(a[i].weight - b[i].weight) / std::max(1.0, std::abs(a[i].weight)));
            out.moment_error = std::max(out.moment_error, scaled_diff(b[i].mean, a[i].mean));
            out.moment_error = std::max(out.moment_error, scaled_diff(b[i].cov, a[i].cov));
        }
    };
    compare_components(oracle.undetected, tracker.undetected);
    if (oracle.tracks.size() != tracker.tracks.size()) {
        fail("track count differs");
        return out;
    }
    for (std::size_t i = 0; i < oracle.tracks.size(); ++i) {
        if (oracle.tracks[i].size() != tracker.tracks[i].size()) {
            fail("leaf count differs in track " + std::to_string(i));
            continue;
        }
        for (std::size_t l = 0; l < oracle.tracks[i].size(); ++l) {
            const auto& a = oracle.tracks[i][l];
            const auto& b = tracker.tracks[i][l];
            if (a.log_weight == kNegInf || b.log_weight == kNegInf) {
                if (a.log_weight != b.log_weight) fail("zero-weight leaf mismatch");
                continue;
            }
            out.weight_error = std::max(out.weight_error, std::abs(a.log_weight - b.log_weight) / std::max(1.0, std::abs(a.log_weight)));
            out.existence_error = std::max(out.existence_error, std::abs(a.existence - b.existence));
            if (a.existence > 0.0) compare_components(a.density, b.density);
        }
    }
    if (oracle.hypotheses.size() != tracker.hypotheses.size()) {
        fail("hypothesis count differs: oracle " + std::to_string(oracle.hypotheses.size()) + ", tracker " +
             std::to_string(tracker.hypotheses.size()));
    }
    for (const auto& [key, lw] : oracle.hypotheses) {
        const auto it = tracker.hypotheses.find(key);
        const double other = it == tracker.hypotheses.end() ? kNegInf : it->second;
        out.hypothesis_error = std::max(out.hypothesis_error, std::abs(std::exp(lw) - std::exp(other)));
    }
    return out;
}

}  // namespace tpmbm::testing
