#include "tpmbm/pmbm_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpmbm {

AssocHistory AssocHistory::extended(MeasurementRef ref) const {
    AssocHistory out;
    out.head_ = std::make_shared<const Node>(Node{ref, size() + 1, head_});
    return out;
}

std::vector<MeasurementRef> AssocHistory::entries() const {
    std::vector<MeasurementRef> out;
    out.reserve(size());
    for (const Node* n = head_.get(); n != nullptr; n = n->prev.get()) out.push_back(n->ref);
    std::reverse(out.begin(), out.end());
    return out;
}

AssocHistory AssocHistory::from_entries(const std::vector<MeasurementRef>& entries) {
    AssocHistory h;
    for (const auto& e : entries) h = h.extended(e);
    return h;
}

PmbmDensity PmbmDensity::with_undetected(TrajectoryMixture undetected, Time time) {
    PmbmDensity d;
    d.time = time;
    d.undetected = std::move(undetected);
    d.hypotheses.push_back(GlobalHypothesis{0.0, {}});
    return d;
}

double log_sum_exp(const std::vector<double>& v) {
    double hi = kNegInf;
    for (double x : v) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_normalizer(const std::vector<GlobalHypothesis>& hypotheses) {
    std::vector<double> v;
    v.reserve(hypotheses.size());
    for (const auto& h : hypotheses) v.push_back(h.log_weight);
    return log_sum_exp(v);
}

void normalize_hypotheses(std::vector<GlobalHypothesis>& hypotheses) {
    const double z = log_normalizer(hypotheses);
    if (!std::isfinite(z)) {
        throw std::runtime_error("normalize_hypotheses: no hypothesis has positive weight");
    }
    for (auto& h : hypotheses) h.log_weight -= z;
}

std::size_t best_hypothesis(const PmbmDensity& d) {
    if (d.hypotheses.empty()) throw std::invalid_argument("best_hypothesis: no hypotheses");
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.hypotheses.size(); ++i) {
        if (d.hypotheses[i].log_weight > d.hypotheses[best].log_weight) best = i;
    }
    return best;
}

void validate_density(const PmbmDensity& d) {
    validate_mixture(d.undetected, MixtureKind::intensity);
    if (d.hypotheses.empty()) throw std::invalid_argument("density: no global hypotheses");
    for (const auto& t : d.tracks) {
        if (t.leaves.empty()) throw std::invalid_argument("density: track without leaves");
        for (const auto& leaf : t.leaves) {
            if (!(leaf.existence >= 0.0 && leaf.existence <= 1.0)) {
                throw std::invalid_argument("density: existence outside [0, 1]");
            }
            if (leaf.existence > 0.0) validate_mixture(leaf.density, MixtureKind::density);
        }
    }
    for (const auto& h : d.hypotheses) {
        if (h.leaves.size() != d.tracks.size()) {
            throw std::invalid_argument("density: hypothesis does not select one leaf per track");
        }
        for (std::size_t i = 0; i < h.leaves.size(); ++i) {
            if (h.leaves[i] >= d.tracks[i].leaves.size()) {
                throw std::invalid_argument("density: hypothesis leaf index out of range");
            }
        }
    }
}

double expected_live_count(const PmbmDensity& d) {
    double total = live_weight(d.undetected, d.time);
    for (const auto& h : d.hypotheses) {
        const double w = std::exp(h.log_weight);
        double count = 0.0;
        for (std::size_t i = 0; i < h.leaves.size(); ++i) {
            const auto& leaf = d.tracks[i].leaves[h.leaves[i]];
            count += leaf.existence * live_weight(leaf.density, d.time);
        }
        total += w * count;
    }
    return total;
}

Moments collapse(const std::vector<TargetComponent>& mixture) {
    if (mixture.empty()) throw std::invalid_argument("collapse: empty mixture");
    const auto n = mixture.front().moments.mean.size();
    double total = 0.0;
    Vector mean = Vector::Zero(n);
    for (const auto& c : mixture) {
        mean += c.weight * c.moments.mean;
        total += c.weight;
    }
    mean /= total;
    Matrix cov = Matrix::Zero(n, n);
    for (const auto& c : mixture) {
        const Vector diff = c.moments.mean - mean;
        cov += c.weight * (c.moments.cov + diff * diff.transpose());
    }
    return Moments{mean, symmetrized(cov / total)};
}

TargetBernoulli marginalize_to_target(const Bernoulli& b, Time k, bool collapse_mixture) {
    TargetBernoulli out;
    const double live = live_weight(b.density, k);
    out.existence = b.existence * live;
    if (!(out.existence > 0.0)) {
        out.existence = 0.0;
        return out;
    }
    for (const auto& c : b.density.components) {
        if (c.end_time != k) continue;
        out.density.push_back(TargetComponent{c.weight / live, c.density.last_step_marginal()});
    }
    if (collapse_mixture && out.density.size() > 1) {
        out.density = {TargetComponent{1.0, collapse(out.density)}};
    }
    return out;
}

}  // namespace tpmbm
