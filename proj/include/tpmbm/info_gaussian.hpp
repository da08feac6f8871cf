#pragma once

#include "tpmbm/types.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpmbm {

/// Raised when a block pivot of the information matrix falls below the
/// positive-definiteness tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minimum accepted Cholesky pivot (squared diagonal of the factor).
inline constexpr double kPivotTolerance = 1e-12;

/// Moments of a single-time Gaussian.
struct Moments {
    Vector mean;
    Matrix cov;
};

/// Dense view of a block-tridiagonal information matrix, used for checkpoints
/// and test oracles.
struct InfoBlocks {
    std::vector<Matrix> diag;   ///< Y[t,t], one per step
    std::vector<Matrix> lower;  ///< Y[t+1,t], one per consecutive pair
    std::vector<Vector> info;   ///< y[t], one per step
};

/// Gaussian density over a stacked state sequence x_{b:e}, held in
/// information form (y, Y) with Y block-tridiagonal.
///
/// Storage is a persistent chain: every step except the last is frozen into
/// an immutable node shared between copies, so copying an InfoGaussian costs
/// one block regardless of the sequence length. Each frozen node also stores
/// the forward-eliminated Schur complement of Y restricted to steps [0, t],
/// which makes the final-step marginal O(1) and full mean recovery a single
/// backward sweep. Y^{-1} is never formed.
class InfoGaussian {
public:
    InfoGaussian() = default;

    /// Single-step density N(mean, cov).
    static InfoGaussian from_moments(const Vector& mean, const Matrix& cov);

    /// Single-step density from information parameters.
    static InfoGaussian from_information(const Vector& info, const Matrix& info_matrix);

    /// Rebuilds a sequence density from its nonzero blocks.
    static InfoGaussian from_blocks(const InfoBlocks& blocks);

    [[nodiscard]] std::size_t length() const { return length_; }
    [[nodiscard]] std::size_t state_dim() const { return static_cast<std::size_t>(diag_.rows()); }
    [[nodiscard]] bool empty() const { return length_ == 0; }

    /// Appends one step under x_{t+1} = F x_t + N(0, Q), given Q^{-1}.
    [[nodiscard]] InfoGaussian predicted(const Matrix& transition, const Matrix& noise_info) const;

    /// Conditions the final step on z = H x + N(0, R), given R^{-1}.
    [[nodiscard]] InfoGaussian updated(const Matrix& obs, const Matrix& noise_info,
                                       const Vector& z) const;

    /// Mean of the whole sequence, stacked oldest step first.
    [[nodiscard]] Vector mean() const;

    /// Marginal moments of the final step.
    [[nodiscard]] Moments last_step_marginal() const;

    /// Marginal of the most recent `lag` steps (older steps integrated out).
    [[nodiscard]] InfoGaussian truncated(std::size_t lag) const;

    [[nodiscard]] InfoBlocks blocks() const;

    /// Dense information vector and matrix. O(l^2 n^2) memory, for tests and dumps.
    [[nodiscard]] Vector dense_info() const;
    [[nodiscard]] Matrix dense_info_matrix() const;

    /// l x l grid, true where the n x n block of Y has a nonzero entry.
    [[nodiscard]] std::vector<std::vector<bool>> block_pattern() const;
    [[nodiscard]] std::size_t nonzero_block_count() const;
    /// Text grid of block_pattern(), 'X' for nonzero and '.' for zero blocks.
    [[nodiscard]] std::string pattern_string() const;

private:
    struct Node;

    static InfoGaussian start(const Matrix& diag, const Vector& info);
    [[nodiscard]] std::shared_ptr<const Node> freeze(const Matrix& extra_diag) const;

    std::shared_ptr<const Node> frozen_;  // step length_-2, null when length_ <= 1
    Matrix diag_;                         // open block Y[l-1,l-1]
    Matrix lower_;                        // Y[l-1,l-2], empty when length_ == 1
    Vector info_;                         // y[l-1]
    Matrix elim_matrix_;                  // B S_{l-2}^{-1} B^T from the frozen prefix
    Vector elim_vector_;                  // B S_{l-2}^{-1} s_{l-2}
    std::size_t length_ = 0;
};

/// Free-function spellings of the sequence operations.
inline InfoGaussian info_predict(const InfoGaussian& g, const Matrix& transition,
                                 const Matrix& noise_info) {
    return g.predicted(transition, noise_info);
}
inline InfoGaussian info_update(const InfoGaussian& g, const Matrix& obs,
                                const Matrix& noise_info, const Vector& z) {
    return g.updated(obs, noise_info, z);
}
inline Vector recover_mean(const InfoGaussian& g) { return g.mean(); }
inline Moments marginal_last_step(const InfoGaussian& g) { return g.last_step_marginal(); }

/// log N(z; mean, cov), via Cholesky of cov.
double log_gaussian_density(const Vector& z, const Vector& mean, const Matrix& cov);

/// log N(z; H m, H P H^T + R) where (m, P) is the final-step marginal of g.
double predictive_likelihood(const InfoGaussian& g, const Matrix& obs, const Matrix& noise_cov,
                             const Vector& z);

/// Cholesky factor with the pivot tolerance applied; throws NumericalError.
Eigen::LLT<Matrix> checked_cholesky(const Matrix& m, const char* what);

}  // namespace tpmbm
