#include "tpmbm/association.hpp"

#include "tpmbm/assignment.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace tpmbm {

double chi2_quantile(double probability, int dof) {
    if (!(probability > 0.0 && probability < 1.0) || dof < 1) {
        throw std::invalid_argument("chi2_quantile: probability must be in (0, 1) and dof >= 1");
    }
    return boost::math::quantile(boost::math::chi_squared(dof), probability);
}

double gate_distance(const Bernoulli& b, const Vector& z, const MeasurementModel& meas, Time k) {
    const MixtureComponent* best = nullptr;
    for (const auto& c : b.density.components) {
        if (c.end_time == k && (best == nullptr || c.weight > best->weight)) best = &c;
    }
    if (best == nullptr || !(b.existence > 0.0)) return kInf;
    const auto m = best->density.last_step_marginal();
    const Matrix s = meas.obs() * m.cov * meas.obs().transpose() + meas.noise_cov();
    auto llt = checked_cholesky(symmetrized(s), "gate");
    const Vector white = llt.matrixL().solve(z - meas.obs() * m.mean);
    return white.squaredNorm();
}

bool gate(const Bernoulli& b, const Vector& z, const MeasurementModel& meas, double gamma, Time k) {
    if (gamma == kInf) return b.existence > 0.0 && live_weight(b.density, k) > 0.0;
    return gate_distance(b, z, meas, k) <= gamma;
}

namespace {

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

struct ClusterRanking {
    std::vector<std::size_t> rows;
    std::vector<std::vector<int>> columns;  // per solution, global column per cluster row
    std::vector<double> costs;
};

ClusterRanking rank_cluster(const AssignmentProblem& p, const std::vector<std::size_t>& rows,
                            std::size_t k) {
    const std::size_t n = p.num_tracks;
    std::vector<std::size_t> tracks;
    for (std::size_t t = 0; t < n; ++t) {
        for (auto r : rows) {
            if (p.cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) < kInf) {
                tracks.push_back(t);
                break;
            }
        }
    }
    const auto a = static_cast<Eigen::Index>(rows.size());
    const auto b = static_cast<Eigen::Index>(tracks.size());
    Matrix cost = Matrix::Constant(a, b + a, kInf);
    for (Eigen::Index i = 0; i < a; ++i) {
        const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
        for (Eigen::Index t = 0; t < b; ++t) {
            cost(i, t) = p.cost(r, static_cast<Eigen::Index>(tracks[static_cast<std::size_t>(t)]));
        }
        cost(i, b + i) = p.cost(r, static_cast<Eigen::Index>(n) + r);
    }
    ClusterRanking out;
    out.rows = rows;
    for (auto& sol : murty_k_best(cost, k)) {
        std::vector<int> cols(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const int c = sol.row_to_col[i];
            cols[i] = c < b ? static_cast<int>(tracks[static_cast<std::size_t>(c)])
                            : static_cast<int>(n + rows[i]);
        }
        out.columns.push_back(std::move(cols));
        out.costs.push_back(sol.cost);
    }
    return out;
}

// Best-first enumeration of combinations of per-cluster solutions. Each index
// vector has a unique predecessor (decrement its last nonzero entry), so no
// visited set is needed.
std::vector<RankedAssignment> combine_clusters(const AssignmentProblem& p,
                                               const std::vector<ClusterRanking>& clusters,
                                               std::size_t k) {
    std::vector<RankedAssignment> out;
    const std::size_t num_rows = static_cast<std::size_t>(p.cost.rows());
    struct Entry {
        double cost;
        std::vector<std::size_t> index;
        std::size_t last;
    };
    auto later = [](const Entry& x, const Entry& y) {
        if (x.cost != y.cost) return x.cost > y.cost;
        return x.index > y.index;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> queue(later);
    Entry start{0.0, std::vector<std::size_t>(clusters.size(), 0), 0};
    for (const auto& c : clusters) start.cost += c.costs.front();
    queue.push(std::move(start));
    while (!queue.empty() && out.size() < k) {
        Entry e = queue.top();
        queue.pop();
        RankedAssignment child;
        child.parent = p.parent;
        child.log_weight = p.base_log_weight - e.cost;
        child.columns.assign(num_rows, -1);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const auto& cols = clusters[c].columns[e.index[c]];
            for (std::size_t i = 0; i < cols.size(); ++i) child.columns[clusters[c].rows[i]] = cols[i];
        }
        out.push_back(std::move(child));
        for (std::size_t c = e.last; c < clusters.size(); ++c) {
            if (e.index[c] + 1 >= clusters[c].costs.size()) continue;
            Entry next{e.cost, e.index, c};
            next.cost += clusters[c].costs[e.index[c] + 1] - clusters[c].costs[e.index[c]];
            ++next.index[c];
            queue.push(std::move(next));
        }
    }
    return out;
}

}  // namespace

std::vector<RankedAssignment> k_best_global(const std::vector<AssignmentProblem>& problems,
                                            std::size_t k_per_parent, std::size_t max_total) {
    if (k_per_parent == 0) throw std::invalid_argument("k_best_global: K must be at least 1");
    std::vector<RankedAssignment> pool;
    for (const auto& p : problems) {
        const auto m = static_cast<std::size_t>(p.cost.rows());
        if (static_cast<std::size_t>(p.cost.cols()) != p.num_tracks + m) {
            throw std::invalid_argument("k_best_global: cost matrix must have tracks + rows columns");
        }
        UnionFind uf(m);
        for (std::size_t t = 0; t < p.num_tracks; ++t) {
            std::size_t first = m;
            for (std::size_t r = 0; r < m; ++r) {
                if (p.cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) < kInf) {
                    if (first == m) first = r;
                    else uf.unite(first, r);
                }
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> groups;
        for (std::size_t r = 0; r < m; ++r) groups[uf.find(r)].push_back(r);
        std::vector<ClusterRanking> clusters;
        bool feasible = true;
        for (const auto& [root, rows] : groups) {
            clusters.push_back(rank_cluster(p, rows, k_per_parent));
            if (clusters.back().costs.empty()) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        auto children = combine_clusters(p, clusters, k_per_parent);
        for (auto& c : children) pool.push_back(std::move(c));
    }
    std::sort(pool.begin(), pool.end(), [](const RankedAssignment& a, const RankedAssignment& b) {
        if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
        if (a.parent != b.parent) return a.parent < b.parent;
        return a.columns < b.columns;
    });
    if (max_total > 0 && pool.size() > max_total) pool.resize(max_total);
    return pool;
}

namespace {

bool hypothesis_before(const GlobalHypothesis& a, const GlobalHypothesis& b) {
    if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
    return a.leaves < b.leaves;
}

// Keeps the tracks flagged in `keep_track`, drops leaves no hypothesis
// references, remaps indices and merges hypotheses that became identical.
PmbmDensity rebuild(const PmbmDensity& d, std::vector<GlobalHypothesis> hypotheses,
                    const std::vector<char>& keep_track) {
    PmbmDensity out;
    out.time = d.time;
    out.undetected = d.undetected;
    const std::size_t n = d.tracks.size();
    std::vector<std::vector<std::int64_t>> remap(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep_track[i]) continue;
        remap[i].assign(d.tracks[i].leaves.size(), -1);
        for (const auto& h : hypotheses) remap[i][h.leaves[i]] = 0;
        Track t{d.tracks[i].origin, {}};
        for (std::size_t l = 0; l < remap[i].size(); ++l) {
            if (remap[i][l] < 0) continue;
            remap[i][l] = static_cast<std::int64_t>(t.leaves.size());
            t.leaves.push_back(d.tracks[i].leaves[l]);
        }
        out.tracks.push_back(std::move(t));
    }
    std::map<std::vector<std::uint32_t>, double> merged;
    for (const auto& h : hypotheses) {
        std::vector<std::uint32_t> leaves;
        leaves.reserve(out.tracks.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (keep_track[i]) leaves.push_back(static_cast<std::uint32_t>(remap[i][h.leaves[i]]));
        }
        auto [it, inserted] = merged.emplace(std::move(leaves), h.log_weight);
        if (!inserted) it->second = log_add(it->second, h.log_weight);
    }
    for (auto& [leaves, lw] : merged) out.hypotheses.push_back(GlobalHypothesis{lw, leaves});
    std::sort(out.hypotheses.begin(), out.hypotheses.end(), hypothesis_before);
    normalize_hypotheses(out.hypotheses);
    return out;
}

}  // namespace

PmbmDensity compact_density(const PmbmDensity& d) {
    std::vector<GlobalHypothesis> hyps;
    for (const auto& h : d.hypotheses) {
        if (h.log_weight > kNegInf) hyps.push_back(h);
    }
    if (hyps.empty()) throw std::runtime_error("compact_density: every hypothesis has zero weight");
    return rebuild(d, std::move(hyps), std::vector<char>(d.tracks.size(), 1));
}

PmbmDensity prune_density(const PmbmDensity& d, const PruneConfig& config) {
    if (!(config.hypothesis_ratio >= 0.0) || !(config.existence_threshold >= 0.0) ||
        !(config.mixture_threshold >= 0.0)) {
        throw std::invalid_argument("prune_density: thresholds must be nonnegative");
    }
    if (d.hypotheses.empty()) throw std::invalid_argument("prune_density: no hypotheses");

    std::vector<GlobalHypothesis> hyps = d.hypotheses;
    std::sort(hyps.begin(), hyps.end(), hypothesis_before);
    const double floor = hyps.front().log_weight +
                         (config.hypothesis_ratio > 0.0 ? std::log(config.hypothesis_ratio) : kNegInf);
    std::erase_if(hyps, [&](const GlobalHypothesis& h) {
        return h.log_weight < floor || h.log_weight == kNegInf;
    });
    if (hyps.empty()) throw std::runtime_error("prune_density: every hypothesis has zero weight");
    if (config.max_hypotheses > 0 && hyps.size() > config.max_hypotheses) {
        hyps.resize(config.max_hypotheses);
    }
    normalize_hypotheses(hyps);

    const std::size_t n = d.tracks.size();
    std::vector<char> keep(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& h : hyps) {
            if (d.tracks[i].leaves[h.leaves[i]].existence >= config.existence_threshold) {
                keep[i] = 1;
                break;
            }
        }
    }
    TrajectoryMixture recycled;
    if (config.recycle) {
        for (std::size_t i = 0; i < n; ++i) {
            if (keep[i]) continue;
            for (const auto& h : hyps) {
                const auto& leaf = d.tracks[i].leaves[h.leaves[i]];
                const double scale = std::exp(h.log_weight) * leaf.existence;
                if (!(scale > 0.0)) continue;
                for (auto c : leaf.density.components) {
                    c.weight *= scale;
                    recycled.components.push_back(std::move(c));
                }
            }
        }
    }

    PmbmDensity out = rebuild(d, std::move(hyps), keep);
    for (auto& c : recycled.components) out.undetected.components.push_back(std::move(c));
    out.undetected = prune_mixture(out.undetected, 0.0, config.max_undetected, MixtureKind::intensity);
    for (auto& t : out.tracks) {
        for (auto& leaf : t.leaves) {
            if (leaf.existence > 0.0 && !leaf.density.empty()) {
                leaf.density = prune_mixture(leaf.density, config.mixture_threshold,
                                             config.max_mixture, MixtureKind::density);
            }
        }
    }
    return out;
}

}  // namespace tpmbm
