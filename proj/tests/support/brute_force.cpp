#include "brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tpmbm::testing {

std::vector<EnumeratedAssignment> enumerate_assignments(const Matrix& cost) {
    const auto rows = static_cast<int>(cost.rows());
    const auto cols = static_cast<int>(cost.cols());
    std::vector<EnumeratedAssignment> out;
    std::vector<int> cur(static_cast<std::size_t>(rows), -1);
    std::vector<bool> used(static_cast<std::size_t>(cols), false);
    std::function<void(int, double)> rec = [&](int r, double acc) {
        if (r == rows) {
            out.push_back(EnumeratedAssignment{acc, cur});
            return;
        }
        for (int c = 0; c < cols; ++c) {
            if (used[static_cast<std::size_t>(c)] || cost(r, c) == kInf) continue;
            used[static_cast<std::size_t>(c)] = true;
            cur[static_cast<std::size_t>(r)] = c;
            rec(r + 1, acc + cost(r, c));
            used[static_cast<std::size_t>(c)] = false;
        }
    };
    rec(0, 0.0);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.row_to_col < b.row_to_col;
    });
    return out;
}

std::vector<RankedAssignment> enumerate_global(const std::vector<AssignmentProblem>& problems) {
    std::vector<RankedAssignment> out;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        for (const auto& a : enumerate_assignments(problems[p].cost)) {
            out.push_back(RankedAssignment{problems[p].base_log_weight - a.cost, p, a.row_to_col});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
        if (a.parent != b.parent) return a.parent < b.parent;
        return a.columns < b.columns;
    });
    return out;
}

namespace {

double distance(const Vector& a, const Vector& b, std::size_t dims) {
    const auto n = dims == 0 ? a.size() : static_cast<Eigen::Index>(dims);
    return (a.head(n) - b.head(n)).norm();
}

}  // namespace

double gospa_brute_force(const std::vector<Vector>& x, const std::vector<Vector>& y, double c, double p,
                         std::size_t dims) {
    const double half = std::pow(c, p) / 2.0;
    double best = kInf;
    std::vector<bool> used(y.size(), false);
    std::function<void(std::size_t, double, std::size_t)> rec = [&](std::size_t i, double acc, std::size_t assigned) {
        if (i == x.size()) {
            const double unassigned = static_cast<double>(x.size() + y.size() - 2 * assigned);
            best = std::min(best, acc + half * unassigned);
            return;
        }
        rec(i + 1, acc, assigned);
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            rec(i + 1, acc + std::pow(std::min(distance(x[i], y[j], dims), c), p), assigned + 1);
            used[j] = false;
        }
    };
    rec(0, 0.0, 0);
    return std::pow(best, 1.0 / p);
}

double traj_metric_brute_force(const std::vector<Trajectory>& truth, const std::vector<Trajectory>& est,
                               const TrajMetricParams& params, Time t_begin, Time t_end, std::size_t dims) {
    const double cp = std::pow(params.c, params.p);
    const double gp = std::pow(params.gamma, params.p);
    const std::size_t n = truth.size();
    const std::size_t m = est.size();

    // All partial injections truth -> est (-1 = unassigned).
    std::vector<std::vector<int>> maps;
    std::vector<int> cur(n, -1);
    std::vector<bool> used(m, false);
    std::function<void(std::size_t)> gen = [&](std::size_t i) {
        if (i == n) {
            maps.push_back(cur);
            return;
        }
        cur[i] = -1;
        gen(i + 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j]) continue;
            used[j] = true;
            cur[i] = static_cast<int>(j);
            gen(i + 1);
            used[j] = false;
        }
        cur[i] = -1;
    };
    gen(0);

    auto step_cost = [&](const std::vector<int>& a, Time t) {
        double cost = 0.0;
        std::vector<bool> taken(m, false);
        for (std::size_t i = 0; i < n; ++i) {
            const bool xe = truth[i].exists_at(t);
            if (a[i] < 0) {
                if (xe) cost += cp / 2.0;
                continue;
            }
            const auto j = static_cast<std::size_t>(a[i]);
            taken[j] = true;
            const bool ye = est[j].exists_at(t);
            if (xe && ye) cost += std::pow(std::min(distance(truth[i].state_at(t), est[j].state_at(t), dims), params.c), params.p);
            else if (xe || ye) cost += cp / 2.0;
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!taken[j] && est[j].exists_at(t)) cost += cp / 2.0;
        }
        return cost;
    };
    auto switch_cost = [&](const std::vector<int>& a, const std::vector<int>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] == b[i]) continue;
            s += (a[i] < 0 || b[i] < 0) ? gp / 2.0 : gp;
        }
        return s;
    };

    double best = kInf;
    std::vector<std::size_t> seq;
    std::function<void(Time, double)> rec = [&](Time t, double acc) {
        if (acc >= best) return;
        if (t > t_end) {
            best = acc;
            return;
        }
        for (std::size_t a = 0; a < maps.size(); ++a) {
            double c = acc + step_cost(maps[a], t);
            if (!seq.empty()) c += switch_cost(maps[seq.back()], maps[a]);
            seq.push_back(a);
            rec(t + 1, c);
            seq.pop_back();
        }
    };
    rec(t_begin, 0.0);
    return std::pow(best, 1.0 / params.p);
}

}  // namespace tpmbm::testing
