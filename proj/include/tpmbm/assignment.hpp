#pragma once

#include "tpmbm/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace tpmbm {

/// A complete assignment of every row to a distinct column.
struct AssignmentSolution {
    double cost = 0.0;
    std::vector<int> row_to_col;
};

/// Minimum-cost assignment of all rows to distinct columns (rows <= cols).
/// Entries equal to +inf are forbidden. Returns nullopt when no feasible
/// assignment exists. Shortest augmenting path with row/column potentials;
/// among equal-cost augmentations the lowest column index is taken, so the
/// result is deterministic.
std::optional<AssignmentSolution> solve_assignment(const Matrix& cost);

/// The k lowest-cost assignments in nondecreasing cost order (Murty's
/// partitioning). Equal costs inside the result are ordered by the
/// lexicographic row_to_col vector. When ties straddle position k, which of
/// them are kept is deterministic but not lexicographically chosen.
std::vector<AssignmentSolution> murty_k_best(const Matrix& cost, std::size_t k);

}  // namespace tpmbm
