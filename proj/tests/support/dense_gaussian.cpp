#include "dense_gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tpmbm::testing {

double dense_log_likelihood(const Vector& z, const Vector& m, const Matrix& p, const Matrix& h,
                            const Matrix& r) {
    const Matrix s = h * p * h.transpose() + r;
    const Vector nu = z - h * m;
    // Full-pivot LU keeps this independent of the Cholesky used by the library.
    const Eigen::FullPivLU<Matrix> lu(s);
    const double quad = nu.dot(lu.solve(nu));
    const double logdet = std::log(lu.determinant());
    return -0.5 * (quad + logdet + static_cast<double>(z.size()) * std::log(2.0 * std::numbers::pi));
}

double kalman_update(Vector& m, Matrix& p, const Vector& z, const Matrix& h, const Matrix& r) {
    const double ll = dense_log_likelihood(z, m, p, h, r);
    const Matrix s = h * p * h.transpose() + r;
    const Matrix k = p * h.transpose() * s.inverse();
    m = m + k * (z - h * m);
    const Matrix ikh = Matrix::Identity(p.rows(), p.cols()) - k * h;
    p = ikh * p * ikh.transpose() + k * r * k.transpose();  // Joseph form
    p = symmetrized(p);
    return ll;
}

void kalman_predict(Vector& m, Matrix& p, const Matrix& f, const Matrix& q) {
    m = f * m;
    p = symmetrized(f * p * f.transpose() + q);
}

DenseSequenceResult dense_sequence(const Vector& m0, const Matrix& p0, const LinearGaussianModel& model,
                                   const std::vector<GaussOp>& ops) {
    const Eigen::Index n = m0.size();
    std::vector<Vector> filt_m{m0}, pred_m{m0};
    std::vector<Matrix> filt_p{p0}, pred_p{p0};
    for (const auto& op : ops) {
        if (op.predict) {
            Vector m = filt_m.back();
            Matrix p = filt_p.back();
            kalman_predict(m, p, model.f, model.q);
            pred_m.push_back(m);
            pred_p.push_back(p);
            filt_m.push_back(m);
            filt_p.push_back(p);
        } else {
            kalman_update(filt_m.back(), filt_p.back(), op.z, model.h, model.r);
        }
    }
    const std::size_t len = filt_m.size();

    // RTS backward pass.
    std::vector<Vector> sm(len);
    sm[len - 1] = filt_m[len - 1];
    for (std::size_t t = len - 1; t-- > 0;) {
        const Matrix g = filt_p[t] * model.f.transpose() * pred_p[t + 1].inverse();
        sm[t] = filt_m[t] + g * (sm[t + 1] - pred_m[t + 1]);
    }

    DenseSequenceResult out;
    out.length = len;
    out.smoothed_mean.resize(static_cast<Eigen::Index>(len) * n);
    for (std::size_t t = 0; t < len; ++t) out.smoothed_mean.segment(static_cast<Eigen::Index>(t) * n, n) = sm[t];
    out.filtered_mean = filt_m.back();
    out.filtered_cov = filt_p.back();

    // Joint information: prior factor, one factor per transition and per measurement.
    const Eigen::Index dim = static_cast<Eigen::Index>(len) * n;
    Matrix y = Matrix::Zero(dim, dim);
    Vector yv = Vector::Zero(dim);
    const Matrix p0i = p0.inverse();
    y.topLeftCorner(n, n) += p0i;
    yv.head(n) += p0i * m0;
    const Matrix qi = model.q.inverse();
    const Matrix ri = model.r.inverse();
    Eigen::Index cur = 0;
    for (const auto& op : ops) {
        if (op.predict) {
            const Eigen::Index nxt = cur + n;
            y.block(cur, cur, n, n) += model.f.transpose() * qi * model.f;
            y.block(cur, nxt, n, n) -= model.f.transpose() * qi;
            y.block(nxt, cur, n, n) -= qi * model.f;
            y.block(nxt, nxt, n, n) += qi;
            cur = nxt;
        } else {
            y.block(cur, cur, n, n) += model.h.transpose() * ri * model.h;
            yv.segment(cur, n) += model.h.transpose() * ri * op.z;
        }
    }
    out.joint_info_matrix = y;
    out.joint_info_vector = yv;
    return out;
}

}  // namespace tpmbm::testing
