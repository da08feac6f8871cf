#pragma once

#include "tpmbm/types.hpp"

#include <Eigen/SparseCore>

namespace tpmbm {

/// Linear program in standard form: minimize c^T x subject to A x = b, x >= 0.
/// A must have full row rank.
struct LinearProgram {
    Eigen::SparseMatrix<double> a;
    Vector b;
    Vector c;
};

struct LpSolution {
    Vector x;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Mehrotra predictor-corrector primal-dual interior-point method. The
/// normal equations A X S^{-1} A^T are factorized with a sparse LDL^T whose
/// symbolic analysis is done once. Stops when the relative primal and dual
/// residuals and the duality measure are all below `tolerance`.
LpSolution solve_lp(const LinearProgram& lp, double tolerance = 1e-9, int max_iterations = 200);

}  // namespace tpmbm
