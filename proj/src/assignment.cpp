#include "tpmbm/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace tpmbm {

std::optional<AssignmentSolution> solve_assignment(const Matrix& cost) {
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    if (n > m) throw std::invalid_argument("solve_assignment: more rows than columns");
    for (Eigen::Index r = 0; r < cost.rows(); ++r) {
        for (Eigen::Index c = 0; c < cost.cols(); ++c) {
            if (std::isnan(cost(r, c)) || cost(r, c) == kNegInf) {
                throw std::invalid_argument("solve_assignment: cost entries must be finite or +inf");
            }
        }
    }
    AssignmentSolution sol;
    sol.row_to_col.assign(n, -1);
    if (n == 0) return sol;

    // 1-based arrays; column 0 is the virtual source of the augmenting path.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = owner[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                        static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (delta == kInf) return std::nullopt;
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    sol.cost = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        if (owner[j] != 0) sol.row_to_col[owner[j] - 1] = static_cast<int>(j - 1);
    }
    for (std::size_t r = 0; r < n; ++r) {
        sol.cost += cost(static_cast<Eigen::Index>(r), sol.row_to_col[r]);
    }
    return sol;
}

namespace {

struct MurtyNode {
    AssignmentSolution solution;
    Matrix cost;                 // with forbidden entries set to +inf
    std::vector<int> fixed;      // column forced for each row, -1 when free
};

struct NodeOrder {
    bool operator()(const MurtyNode& a, const MurtyNode& b) const {
        if (a.solution.cost != b.solution.cost) return a.solution.cost > b.solution.cost;
        return a.solution.row_to_col > b.solution.row_to_col;
    }
};

// Solves the problem restricted to the free rows and the columns not taken
// by fixed rows, then merges the fixed pairs back in.
std::optional<AssignmentSolution> solve_constrained(const Matrix& cost,
                                                    const std::vector<int>& fixed) {
    const auto n = cost.rows();
    const auto m = cost.cols();
    std::vector<Eigen::Index> rows, cols;
    std::vector<char> col_taken(static_cast<std::size_t>(m), 0);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (fixed[static_cast<std::size_t>(r)] >= 0) {
            col_taken[static_cast<std::size_t>(fixed[static_cast<std::size_t>(r)])] = 1;
        } else {
            rows.push_back(r);
        }
    }
    for (Eigen::Index c = 0; c < m; ++c) {
        if (!col_taken[static_cast<std::size_t>(c)]) cols.push_back(c);
    }
    Matrix reduced(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            reduced(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cost(rows[a], cols[b]);
        }
    }
    auto sub = solve_assignment(reduced);
    if (!sub) return std::nullopt;
    AssignmentSolution out;
    out.row_to_col.assign(static_cast<std::size_t>(n), -1);
    out.cost = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        if (fixed[static_cast<std::size_t>(r)] >= 0) {
            out.row_to_col[static_cast<std::size_t>(r)] = fixed[static_cast<std::size_t>(r)];
        }
    }
    for (std::size_t a = 0; a < rows.size(); ++a) {
        out.row_to_col[static_cast<std::size_t>(rows[a])] =
            static_cast<int>(cols[static_cast<std::size_t>(sub->row_to_col[a])]);
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        const double c = cost(r, out.row_to_col[static_cast<std::size_t>(r)]);
        if (c == kInf) return std::nullopt;
        out.cost += c;
    }
    return out;
}

}  // namespace

std::vector<AssignmentSolution> murty_k_best(const Matrix& cost, std::size_t k) {
    std::vector<AssignmentSolution> out;
    if (k == 0) return out;
    std::vector<int> none(static_cast<std::size_t>(cost.rows()), -1);
    auto first = solve_constrained(cost, none);
    if (!first) return out;

    std::priority_queue<MurtyNode, std::vector<MurtyNode>, NodeOrder> queue;
    queue.push(MurtyNode{*first, cost, none});
    while (!queue.empty() && out.size() < k) {
        MurtyNode node = queue.top();
        queue.pop();
        out.push_back(node.solution);
        if (out.size() == k) break;

        // Partition the node's solution space: child t forbids the t-th free
        // pair and fixes every earlier free pair.
        std::vector<int> fixed = node.fixed;
        for (std::size_t r = 0; r < fixed.size(); ++r) {
            if (node.fixed[r] >= 0) continue;
            const int col = node.solution.row_to_col[r];
            Matrix child_cost = node.cost;
            child_cost(static_cast<Eigen::Index>(r), col) = kInf;
            auto child = solve_constrained(child_cost, fixed);
            if (child) queue.push(MurtyNode{std::move(*child), std::move(child_cost), fixed});
            fixed[r] = col;
        }
    }
    // A popped node's children may tie with solutions already emitted, so the
    // pop order alone does not give a lexicographic order within equal costs.
    std::stable_sort(out.begin(), out.end(), [](const AssignmentSolution& a, const AssignmentSolution& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.row_to_col < b.row_to_col;
    });
    return out;
}

}  // namespace tpmbm
