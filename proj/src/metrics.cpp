#include "tpmbm/metrics.hpp"

#include "tpmbm/assignment.hpp"
#include "tpmbm/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tpmbm {

void GospaParams::validate() const {
    if (!(c > 0.0) || !(p >= 1.0)) throw std::invalid_argument("GOSPA: need c > 0 and p >= 1");
}

void TrajMetricParams::validate() const {
    if (!(c > 0.0) || !(p >= 1.0) || !(gamma >= 0.0)) {
        throw std::invalid_argument("trajectory metric: need c > 0, p >= 1, gamma >= 0");
    }
}

namespace {

double point_distance(const Vector& a, const Vector& b, std::size_t dims) {
    if (dims == 0) {
        if (a.size() != b.size()) throw std::invalid_argument("metric: point dimension mismatch");
        return (a - b).norm();
    }
    const auto n = static_cast<Eigen::Index>(dims);
    if (a.size() < n || b.size() < n) throw std::invalid_argument("metric: point dimension too small");
    return (a.head(n) - b.head(n)).norm();
}

}  // namespace

GospaResult gospa(const std::vector<Vector>& truth, const std::vector<Vector>& est,
                  const GospaParams& params, std::size_t dims) {
    params.validate();
    const std::size_t n = truth.size();
    const std::size_t m = est.size();
    const double cp = std::pow(params.c, params.p);
    GospaResult r;
    std::vector<int> match(n, -1);
    if (n > 0 && m > 0) {
        // Savings relative to leaving both unassigned; dummy columns cost 0.
        Matrix cost = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m + n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double d = std::min(point_distance(truth[i], est[j], dims), params.c);
                cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(d, params.p) - cp;
            }
        }
        const auto sol = solve_assignment(cost);
        for (std::size_t i = 0; i < n; ++i) {
            const int j = sol->row_to_col[i];
            if (j < static_cast<int>(m) && point_distance(truth[i], est[static_cast<std::size_t>(j)], dims) < params.c) {
                match[i] = j;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (match[i] >= 0) {
            r.location += std::pow(point_distance(truth[i], est[static_cast<std::size_t>(match[i])], dims), params.p);
            ++r.num_assigned;
        }
    }
    r.num_missed = n - r.num_assigned;
    r.num_false = m - r.num_assigned;
    r.missed = 0.5 * cp * static_cast<double>(r.num_missed);
    r.false_ = 0.5 * cp * static_cast<double>(r.num_false);
    r.total = std::pow(r.location + r.missed + r.false_, 1.0 / params.p);
    return r;
}

namespace {

struct MetricProblem {
    const std::vector<Trajectory>& truth;
    const std::vector<Trajectory>& est;
    const TrajMetricParams& params;
    Time t_begin;
    std::size_t steps;
    std::size_t dims;
    double cp;
    double half_cp;
    double gp;

    bool truth_exists(std::size_t i, std::size_t t) const {
        return truth[i].exists_at(t_begin + static_cast<Time>(t));
    }
    bool est_exists(std::size_t j, std::size_t t) const {
        return est[j].exists_at(t_begin + static_cast<Time>(t));
    }
    double distance(std::size_t i, std::size_t j, std::size_t t) const {
        const Time at = t_begin + static_cast<Time>(t);
        return point_distance(truth[i].state_at(at), est[j].state_at(at), dims);
    }
};

// Cost of one component split into (location, missed, false) for a pair
// (i, j) at step t; j < 0 means truth i is unassigned.
void pair_cost(const MetricProblem& pr, std::size_t i, int j, std::size_t t, double weight,
               TrajMetricResult& acc) {
    const bool xe = pr.truth_exists(i, t);
    if (j < 0) {
        if (xe) acc.missed += weight * pr.half_cp;
        return;
    }
    const bool ye = pr.est_exists(static_cast<std::size_t>(j), t);
    if (xe && ye) {
        const double d = pr.distance(i, static_cast<std::size_t>(j), t);
        if (d < pr.params.c) {
            acc.location += weight * std::pow(d, pr.params.p);
        } else {
            acc.missed += weight * pr.half_cp;
            acc.false_ += weight * pr.half_cp;
        }
    } else if (xe) {
        acc.missed += weight * pr.half_cp;
    } else if (ye) {
        acc.false_ += weight * pr.half_cp;
    }
}

double pair_value(const MetricProblem& pr, std::size_t i, int j, std::size_t t) {
    TrajMetricResult acc;
    pair_cost(pr, i, j, t, 1.0, acc);
    return acc.location + acc.missed + acc.false_;
}

double switch_units(int a, int b) {
    if (a == b) return 0.0;
    if (a >= 0 && b >= 0) return 1.0;
    return 0.5;
}

// Exact minimum over assignment sequences for one group by dynamic programming.
void solve_group_dp(const MetricProblem& pr, const std::vector<std::size_t>& ti,
                    const std::vector<std::size_t>& ej, const std::vector<std::vector<int>>& states,
                    TrajMetricResult& acc) {
    const std::size_t ns = states.size();
    const std::size_t a = ti.size();
    const std::size_t b = ej.size();
    std::vector<double> sw(ns * ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t u = 0; u < ns; ++u) {
            double units = 0.0;
            for (std::size_t i = 0; i < a; ++i) units += switch_units(states[s][i], states[u][i]);
            sw[s * ns + u] = pr.gp * units;
        }
    }
    auto state_cost = [&](std::size_t s, std::size_t t) {
        double total = 0.0;
        std::vector<char> used(b, 0);
        for (std::size_t i = 0; i < a; ++i) {
            const int j = states[s][i];
            if (j >= 0) used[static_cast<std::size_t>(j)] = 1;
            total += pair_value(pr, ti[i], j < 0 ? -1 : static_cast<int>(ej[static_cast<std::size_t>(j)]), t);
        }
        for (std::size_t j = 0; j < b; ++j) {
            if (!used[j] && pr.est_exists(ej[j], t)) total += pr.half_cp;
        }
        return total;
    };

    std::vector<double> cost(ns), next(ns);
    std::vector<std::uint32_t> back(pr.steps * ns, 0);
    for (std::size_t s = 0; s < ns; ++s) cost[s] = state_cost(s, 0);
    for (std::size_t t = 1; t < pr.steps; ++t) {
        for (std::size_t u = 0; u < ns; ++u) {
            double best = kInf;
            std::uint32_t arg = 0;
            for (std::size_t s = 0; s < ns; ++s) {
                const double v = cost[s] + sw[s * ns + u];
                if (v < best) {
                    best = v;
                    arg = static_cast<std::uint32_t>(s);
                }
            }
            next[u] = best + state_cost(u, t);
            back[t * ns + u] = arg;
        }
        std::swap(cost, next);
    }
    std::size_t s = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    std::vector<std::size_t> path(pr.steps);
    for (std::size_t t = pr.steps; t-- > 0;) {
        path[t] = s;
        if (t > 0) s = back[t * ns + s];
    }
    for (std::size_t t = 0; t < pr.steps; ++t) {
        const auto& st = states[path[t]];
        std::vector<char> used(b, 0);
        for (std::size_t i = 0; i < a; ++i) {
            const int j = st[i];
            if (j >= 0) used[static_cast<std::size_t>(j)] = 1;
            pair_cost(pr, ti[i], j < 0 ? -1 : static_cast<int>(ej[static_cast<std::size_t>(j)]), t, 1.0, acc);
        }
        for (std::size_t j = 0; j < b; ++j) {
            if (!used[j] && pr.est_exists(ej[j], t)) acc.false_ += pr.half_cp;
        }
        if (t + 1 < pr.steps) acc.switch_ += sw[path[t] * ns + path[t + 1]];
    }
}

// Linear-programming relaxation for one group: per step a fractional
// assignment matrix W_t (with a "nothing" row and column) and switch
// variables bounding |W_t - W_{t+1}| on the allowed pairs.
void solve_group_lp(const MetricProblem& pr, const std::vector<std::size_t>& ti,
                    const std::vector<std::size_t>& ej,
                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                    TrajMetricResult& acc) {
    const std::size_t a = ti.size();
    const std::size_t b = ej.size();
    const std::size_t np = pairs.size();
    const std::size_t per_step = np + a + b;  // pair, truth-to-nothing, nothing-to-estimate
    const std::size_t steps = pr.steps;
    const std::size_t num_w = per_step * steps;
    const std::size_t num_aux = steps > 1 ? 2 * np * (steps - 1) : 0;
    const std::size_t num_vars = num_w + num_aux;
    const std::size_t num_rows = (a + b) * steps + np * (steps > 1 ? steps - 1 : 0);

    auto w_pair = [&](std::size_t t, std::size_t p) { return t * per_step + p; };
    auto w_truth = [&](std::size_t t, std::size_t i) { return t * per_step + np + i; };
    auto w_est = [&](std::size_t t, std::size_t j) { return t * per_step + np + a + j; };
    auto aux = [&](std::size_t t, std::size_t p, int sign) {
        return num_w + 2 * (t * np + p) + (sign > 0 ? 0 : 1);
    };

    std::vector<Eigen::Triplet<double>> trip;
    Vector rhs = Vector::Zero(static_cast<Eigen::Index>(num_rows));
    Vector obj = Vector::Zero(static_cast<Eigen::Index>(num_vars));
    std::size_t row = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < a; ++i, ++row) {
            for (std::size_t p = 0; p < np; ++p) {
                if (pairs[p].first == i) trip.emplace_back(row, w_pair(t, p), 1.0);
            }
            trip.emplace_back(row, w_truth(t, i), 1.0);
            rhs(static_cast<Eigen::Index>(row)) = 1.0;
        }
        for (std::size_t j = 0; j < b; ++j, ++row) {
            for (std::size_t p = 0; p < np; ++p) {
                if (pairs[p].second == j) trip.emplace_back(row, w_pair(t, p), 1.0);
            }
            trip.emplace_back(row, w_est(t, j), 1.0);
            rhs(static_cast<Eigen::Index>(row)) = 1.0;
        }
        for (std::size_t p = 0; p < np; ++p) {
            obj(static_cast<Eigen::Index>(w_pair(t, p))) =
                pair_value(pr, ti[pairs[p].first], static_cast<int>(ej[pairs[p].second]), t);
        }
        for (std::size_t i = 0; i < a; ++i) {
            obj(static_cast<Eigen::Index>(w_truth(t, i))) = pr.truth_exists(ti[i], t) ? pr.half_cp : 0.0;
        }
        for (std::size_t j = 0; j < b; ++j) {
            obj(static_cast<Eigen::Index>(w_est(t, j))) = pr.est_exists(ej[j], t) ? pr.half_cp : 0.0;
        }
    }
    for (std::size_t t = 0; t + 1 < steps; ++t) {
        for (std::size_t p = 0; p < np; ++p, ++row) {
            trip.emplace_back(row, w_pair(t, p), 1.0);
            trip.emplace_back(row, w_pair(t + 1, p), -1.0);
            trip.emplace_back(row, aux(t, p, +1), -1.0);
            trip.emplace_back(row, aux(t, p, -1), 1.0);
            obj(static_cast<Eigen::Index>(aux(t, p, +1))) = 0.5 * pr.gp;
            obj(static_cast<Eigen::Index>(aux(t, p, -1))) = 0.5 * pr.gp;
        }
    }
    LinearProgram lp;
    lp.a.resize(static_cast<Eigen::Index>(num_rows), static_cast<Eigen::Index>(num_vars));
    lp.a.setFromTriplets(trip.begin(), trip.end());
    lp.b = rhs;
    lp.c = obj;
    const auto sol = solve_lp(lp, 1e-10, 300);
    if (!sol.converged) throw std::runtime_error("trajectory metric: LP relaxation did not converge");
    const Vector& x = sol.x;
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t p = 0; p < np; ++p) {
            pair_cost(pr, ti[pairs[p].first], static_cast<int>(ej[pairs[p].second]), t,
                      x(static_cast<Eigen::Index>(w_pair(t, p))), acc);
        }
        for (std::size_t i = 0; i < a; ++i) {
            if (pr.truth_exists(ti[i], t)) acc.missed += x(static_cast<Eigen::Index>(w_truth(t, i))) * pr.half_cp;
        }
        for (std::size_t j = 0; j < b; ++j) {
            if (pr.est_exists(ej[j], t)) acc.false_ += x(static_cast<Eigen::Index>(w_est(t, j))) * pr.half_cp;
        }
    }
    for (std::size_t v = num_w; v < num_vars; ++v) acc.switch_ += 0.5 * pr.gp * x(static_cast<Eigen::Index>(v));
    acc.exact = false;
}

std::size_t count_states(const std::vector<std::vector<int>>& allowed, std::size_t b, std::size_t limit) {
    std::size_t count = 0;
    std::vector<char> used(b, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (count > limit) return;
        if (i == allowed.size()) {
            ++count;
            return;
        }
        rec(i + 1);
        for (int j : allowed[i]) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = 1;
            rec(i + 1);
            used[static_cast<std::size_t>(j)] = 0;
        }
    };
    rec(0);
    return count;
}

std::vector<std::vector<int>> enumerate_states(const std::vector<std::vector<int>>& allowed, std::size_t b) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(allowed.size(), -1);
    std::vector<char> used(b, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == allowed.size()) {
            out.push_back(cur);
            return;
        }
        cur[i] = -1;
        rec(i + 1);
        for (int j : allowed[i]) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = 1;
            cur[i] = j;
            rec(i + 1);
            used[static_cast<std::size_t>(j)] = 0;
        }
        cur[i] = -1;
    };
    rec(0);
    return out;
}

}  // namespace

TrajMetricResult traj_metric(const std::vector<Trajectory>& truth,
                             const std::vector<Trajectory>& est, const TrajMetricParams& params,
                             Time t_begin, Time t_end, std::size_t dims, TrajMetricMethod method,
                             std::size_t max_exact_states) {
    params.validate();
    if (t_end < t_begin) throw std::invalid_argument("trajectory metric: empty window");
    for (const auto* set : {&truth, &est}) {
        for (const auto& tr : *set) tr.validate();
    }
    const double cp = std::pow(params.c, params.p);
    MetricProblem pr{truth, est, params, t_begin, static_cast<std::size_t>(t_end - t_begin) + 1,
                     dims, cp, 0.5 * cp, std::pow(params.gamma, params.p)};
    const std::size_t n = truth.size();
    const std::size_t m = est.size();

    // Pairs worth assigning, and the groups they connect.
    std::vector<std::size_t> parent(n + m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<std::vector<char>> useful(n, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t t = 0; t < pr.steps; ++t) {
                if (pr.truth_exists(i, t) && pr.est_exists(j, t) && pr.distance(i, j, t) < params.c) {
                    useful[i][j] = 1;
                    break;
                }
            }
            if (useful[i][j]) {
                const auto ri = find(i);
                const auto rj = find(n + j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }

    TrajMetricResult acc;
    for (std::size_t root = 0; root < n + m; ++root) {
        if (find(root) != root) continue;
        std::vector<std::size_t> ti, ej;
        for (std::size_t i = 0; i < n; ++i) {
            if (find(i) == root) ti.push_back(i);
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (find(n + j) == root) ej.push_back(j);
        }
        if (ti.empty() || ej.empty()) {
            for (auto i : ti) {
                for (std::size_t t = 0; t < pr.steps; ++t) {
                    if (pr.truth_exists(i, t)) acc.missed += pr.half_cp;
                }
            }
            for (auto j : ej) {
                for (std::size_t t = 0; t < pr.steps; ++t) {
                    if (pr.est_exists(j, t)) acc.false_ += pr.half_cp;
                }
            }
            continue;
        }
        std::vector<std::vector<int>> allowed(ti.size());
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < ti.size(); ++a) {
            for (std::size_t b = 0; b < ej.size(); ++b) {
                if (useful[ti[a]][ej[b]]) {
                    allowed[a].push_back(static_cast<int>(b));
                    pairs.emplace_back(a, b);
                }
            }
        }
        bool use_lp = method == TrajMetricMethod::lp;
        if (method == TrajMetricMethod::automatic) {
            use_lp = count_states(allowed, ej.size(), max_exact_states) > max_exact_states;
        }
        if (use_lp) {
            solve_group_lp(pr, ti, ej, pairs, acc);
        } else {
            solve_group_dp(pr, ti, ej, enumerate_states(allowed, ej.size()), acc);
        }
    }
    acc.total = std::pow(std::max(0.0, acc.location + acc.missed + acc.false_ + acc.switch_), 1.0 / params.p);
    return acc;
}

TrajMetricResult traj_metric(const std::vector<Trajectory>& truth,
                             const std::vector<Trajectory>& est, const TrajMetricParams& params,
                             std::size_t dims) {
    Time lo = std::numeric_limits<Time>::max();
    Time hi = 0;
    for (const auto* set : {&truth, &est}) {
        for (const auto& tr : *set) {
            lo = std::min(lo, tr.birth_time);
            hi = std::max(hi, tr.end_time);
        }
    }
    if (lo > hi) throw std::invalid_argument("trajectory metric: empty window");
    return traj_metric(truth, est, params, lo, hi, dims);
}

}  // namespace tpmbm
