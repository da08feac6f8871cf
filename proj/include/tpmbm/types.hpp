#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>

namespace tpmbm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Discrete time index, starting at 0.
using Time = std::uint32_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Symmetric part of a square matrix.
inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace tpmbm
