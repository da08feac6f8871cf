#pragma once

#include "tpmbm/types.hpp"

#include <vector>

namespace tpmbm::testing {

/// One operation of a linear-Gaussian sequence: a prediction step (append a
/// state) or a measurement of the latest state.
struct GaussOp {
    bool predict = false;
    Vector z;  ///< measurement, used when predict is false
};

struct LinearGaussianModel {
    Matrix f, q, h, r;
};

struct DenseSequenceResult {
    Vector smoothed_mean;  ///< stacked oldest step first
    Vector filtered_mean;  ///< final step
    Matrix filtered_cov;
    Matrix joint_info_matrix;  ///< Y built term by term from the factorization of the joint density
    Vector joint_info_vector;
    std::size_t length = 0;
};

/// Covariance-form Kalman filter and Rauch-Tung-Striebel smoother over the
/// operation sequence, starting from N(m0, p0) at the first step. Also
/// assembles the dense information form of the joint density.
DenseSequenceResult dense_sequence(const Vector& m0, const Matrix& p0, const LinearGaussianModel& model,
                                   const std::vector<GaussOp>& ops);

/// Predictive log likelihood log N(z; H m, H P H^T + R), covariance form.
double dense_log_likelihood(const Vector& z, const Vector& m, const Matrix& p, const Matrix& h,
                            const Matrix& r);

/// Kalman update of (m, p) with z. Returns the log predictive likelihood.
double kalman_update(Vector& m, Matrix& p, const Vector& z, const Matrix& h, const Matrix& r);

void kalman_predict(Vector& m, Matrix& p, const Matrix& f, const Matrix& q);

}  // namespace tpmbm::testing
