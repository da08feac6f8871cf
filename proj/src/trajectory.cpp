#include "tpmbm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace tpmbm {

void Trajectory::validate() const {
    if (birth_time > end_time) {
        throw std::invalid_argument("Trajectory: birth_time after end_time");
    }
    if (states.size() != static_cast<std::size_t>(end_time - birth_time) + 1) {
        throw std::invalid_argument("Trajectory: state count does not match the span");
    }
    for (const auto& s : states) {
        if (s.size() != states.front().size()) {
            throw std::invalid_argument("Trajectory: inconsistent state dimension");
        }
    }
}

bool restrict_to(const Trajectory& in, Time k, Trajectory& out) {
    if (in.birth_time > k) return false;
    out.birth_time = in.birth_time;
    out.end_time = std::min(in.end_time, k);
    out.states.assign(in.states.begin(),
                      in.states.begin() + static_cast<std::ptrdiff_t>(out.end_time - in.birth_time + 1));
    return true;
}

double set_integral_weight(const TrajectoryMixture& mixture) {
    double total = 0.0;
    for (const auto& c : mixture.components) total += c.weight;
    return total;
}

double live_weight(const TrajectoryMixture& mixture, Time k) {
    double total = 0.0;
    for (const auto& c : mixture.components) {
        if (c.end_time == k) total += c.weight;
    }
    return total;
}

TrajectoryMixture prune_mixture(const TrajectoryMixture& mixture, double weight_threshold,
                                std::size_t max_components, MixtureKind kind) {
    if (!(weight_threshold >= 0.0)) {
        throw std::invalid_argument("prune_mixture: weight_threshold must be nonnegative");
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < mixture.components.size(); ++i) {
        if (mixture.components[i].weight >= weight_threshold) keep.push_back(i);
    }
    if (max_components > 0 && keep.size() > max_components) {
        std::vector<std::size_t> order = keep;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return mixture.components[a].weight > mixture.components[b].weight;
        });
        order.resize(max_components);
        std::sort(order.begin(), order.end());
        keep = std::move(order);
    }
    if (kind == MixtureKind::density && keep.empty() && !mixture.components.empty()) {
        throw std::invalid_argument("prune_mixture: pruning would remove every component");
    }
    TrajectoryMixture out;
    out.components.reserve(keep.size());
    double total = 0.0;
    for (auto i : keep) {
        out.components.push_back(mixture.components[i]);
        total += mixture.components[i].weight;
    }
    if (kind == MixtureKind::density && total > 0.0) {
        for (auto& c : out.components) c.weight /= total;
    }
    return out;
}

void validate_mixture(const TrajectoryMixture& mixture, MixtureKind kind) {
    double total = 0.0;
    for (const auto& c : mixture.components) {
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
            throw std::invalid_argument("mixture: component weight must be finite and nonnegative");
        }
        if (c.birth_time > c.end_time) {
            throw std::invalid_argument("mixture: component birth after end");
        }
        if (c.density.empty() ||
            c.density.length() > static_cast<std::size_t>(c.end_time - c.birth_time) + 1) {
            throw std::invalid_argument("mixture: sequence length does not fit the span");
        }
        total += c.weight;
    }
    if (kind == MixtureKind::density && !mixture.components.empty() &&
        std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("mixture: density weights do not sum to one");
    }
}

bool has_distinct_keys(const TrajectoryMixture& mixture) {
    std::set<std::pair<Time, Time>> keys;
    for (const auto& c : mixture.components) {
        if (!keys.emplace(c.birth_time, c.end_time).second) return false;
    }
    return true;
}

std::size_t heaviest_component(const TrajectoryMixture& mixture) {
    if (mixture.components.empty()) {
        throw std::invalid_argument("heaviest_component: empty mixture");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < mixture.components.size(); ++i) {
        if (mixture.components[i].weight > mixture.components[best].weight) best = i;
    }
    return best;
}

}  // namespace tpmbm
