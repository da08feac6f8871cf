#include "tpmbm/info_gaussian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace tpmbm {

struct InfoGaussian::Node {
    Matrix diag;   // final Y[t,t]
    Matrix lower;  // Y[t,t-1]; empty for the first step
    Vector info;   // y[t]
    Matrix schur;  // S_t = Y[t,t] - Y[t,t-1] S_{t-1}^{-1} Y[t-1,t]
    Eigen::LLT<Matrix> schur_llt;
    Vector schur_info;  // s_t
    std::shared_ptr<const Node> prev;
};

Eigen::LLT<Matrix> checked_cholesky(const Matrix& m, const char* what) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": matrix is not positive definite");
    }
    const Matrix& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double pivot = l(i, i) * l(i, i);
        if (!(pivot >= kPivotTolerance)) {
            throw NumericalError(std::string(what) + ": pivot below tolerance");
        }
    }
    return llt;
}

InfoGaussian InfoGaussian::start(const Matrix& diag, const Vector& info) {
    if (diag.rows() != diag.cols() || diag.rows() != info.size() || diag.rows() == 0) {
        throw std::invalid_argument("InfoGaussian: inconsistent block dimensions");
    }
    InfoGaussian g;
    g.diag_ = symmetrized(diag);
    g.info_ = info;
    g.length_ = 1;
    return g;
}

InfoGaussian InfoGaussian::from_moments(const Vector& mean, const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
        throw std::invalid_argument("from_moments: dimension mismatch");
    }
    auto llt = checked_cholesky(symmetrized(cov), "from_moments");
    const Matrix info_matrix =
        symmetrized(llt.solve(Matrix::Identity(cov.rows(), cov.cols())));
    return start(info_matrix, info_matrix * mean);
}

InfoGaussian InfoGaussian::from_information(const Vector& info, const Matrix& info_matrix) {
    return start(info_matrix, info);
}

std::shared_ptr<const InfoGaussian::Node> InfoGaussian::freeze(const Matrix& extra_diag) const {
    auto node = std::make_shared<Node>();
    node->diag = symmetrized(diag_ + extra_diag);
    node->lower = lower_;
    node->info = info_;
    if (frozen_) {
        node->schur = symmetrized(node->diag - elim_matrix_);
        node->schur_info = info_ - elim_vector_;
    } else {
        node->schur = node->diag;
        node->schur_info = info_;
    }
    node->schur_llt = checked_cholesky(node->schur, "InfoGaussian block elimination");
    node->prev = frozen_;
    return node;
}

InfoGaussian InfoGaussian::predicted(const Matrix& transition, const Matrix& noise_info) const {
    const auto n = diag_.rows();
    if (length_ == 0) throw std::invalid_argument("info_predict: empty density");
    if (transition.rows() != n || transition.cols() != n || noise_info.rows() != n ||
        noise_info.cols() != n) {
        throw std::invalid_argument("info_predict: dimension mismatch");
    }
    const Matrix ft_qinv = transition.transpose() * noise_info;
    InfoGaussian out;
    out.frozen_ = freeze(ft_qinv * transition);
    out.diag_ = symmetrized(noise_info);
    out.lower_ = -(noise_info * transition);
    out.info_ = Vector::Zero(n);
    const Matrix solved = out.frozen_->schur_llt.solve(out.lower_.transpose());
    out.elim_matrix_ = symmetrized(out.lower_ * solved);
    out.elim_vector_ = solved.transpose() * out.frozen_->schur_info;
    out.length_ = length_ + 1;
    return out;
}

InfoGaussian InfoGaussian::updated(const Matrix& obs, const Matrix& noise_info,
                                   const Vector& z) const {
    const auto n = diag_.rows();
    if (length_ == 0) throw std::invalid_argument("info_update: empty density");
    if (obs.cols() != n || obs.rows() != z.size() || noise_info.rows() != z.size() ||
        noise_info.cols() != z.size()) {
        throw std::invalid_argument("info_update: dimension mismatch");
    }
    const Matrix ht_rinv = obs.transpose() * noise_info;
    InfoGaussian out = *this;
    out.diag_ = symmetrized(diag_ + ht_rinv * obs);
    out.info_ = info_ + ht_rinv * z;
    return out;
}

Moments InfoGaussian::last_step_marginal() const {
    if (length_ == 0) throw std::invalid_argument("marginal_last_step: empty density");
    Matrix schur = diag_;
    Vector schur_info = info_;
    if (frozen_) {
        schur = symmetrized(diag_ - elim_matrix_);
        schur_info = info_ - elim_vector_;
    }
    auto llt = checked_cholesky(schur, "marginal_last_step");
    Moments m;
    m.cov = symmetrized(llt.solve(Matrix::Identity(schur.rows(), schur.cols())));
    m.mean = llt.solve(schur_info);
    return m;
}

Vector InfoGaussian::mean() const {
    if (length_ == 0) throw std::invalid_argument("recover_mean: empty density");
    const auto n = diag_.rows();
    Vector out(static_cast<Eigen::Index>(length_) * n);

    Matrix schur = frozen_ ? Matrix(symmetrized(diag_ - elim_matrix_)) : diag_;
    Vector schur_info = frozen_ ? Vector(info_ - elim_vector_) : info_;
    auto llt = checked_cholesky(schur, "recover_mean");
    Vector next = llt.solve(schur_info);
    auto pos = static_cast<Eigen::Index>(length_ - 1) * n;
    out.segment(pos, n) = next;

    const Matrix* next_lower = &lower_;
    for (const Node* node = frozen_.get(); node != nullptr; node = node->prev.get()) {
        pos -= n;
        next = node->schur_llt.solve(node->schur_info - next_lower->transpose() * next);
        out.segment(pos, n) = next;
        next_lower = &node->lower;
    }
    return out;
}

InfoBlocks InfoGaussian::blocks() const {
    InfoBlocks b;
    if (length_ == 0) return b;
    b.diag.resize(length_);
    b.info.resize(length_);
    b.lower.resize(length_ - 1);
    std::size_t t = length_ - 1;
    b.diag[t] = diag_;
    b.info[t] = info_;
    if (t > 0) b.lower[t - 1] = lower_;
    for (const Node* node = frozen_.get(); node != nullptr; node = node->prev.get()) {
        --t;
        b.diag[t] = node->diag;
        b.info[t] = node->info;
        if (t > 0) b.lower[t - 1] = node->lower;
    }
    return b;
}

InfoGaussian InfoGaussian::from_blocks(const InfoBlocks& blocks) {
    const auto len = blocks.diag.size();
    if (len == 0 || blocks.info.size() != len || blocks.lower.size() + 1 != len) {
        throw std::invalid_argument("from_blocks: inconsistent block counts");
    }
    InfoGaussian g = start(blocks.diag[0], blocks.info[0]);
    const auto n = g.diag_.rows();
    for (std::size_t t = 1; t < len; ++t) {
        const Matrix& lower = blocks.lower[t - 1];
        if (blocks.diag[t].rows() != n || blocks.diag[t].cols() != n || lower.rows() != n ||
            lower.cols() != n || blocks.info[t].size() != n) {
            throw std::invalid_argument("from_blocks: block dimension mismatch");
        }
        InfoGaussian next;
        next.frozen_ = g.freeze(Matrix::Zero(n, n));
        next.diag_ = symmetrized(blocks.diag[t]);
        next.lower_ = lower;
        next.info_ = blocks.info[t];
        const Matrix solved = next.frozen_->schur_llt.solve(lower.transpose());
        next.elim_matrix_ = symmetrized(lower * solved);
        next.elim_vector_ = solved.transpose() * next.frozen_->schur_info;
        next.length_ = t + 1;
        g = std::move(next);
    }
    return g;
}

InfoGaussian InfoGaussian::truncated(std::size_t lag) const {
    if (lag == 0) throw std::invalid_argument("truncated: lag must be positive");
    if (lag >= length_) return *this;
    if (lag == 1) {
        const Matrix schur = symmetrized(diag_ - elim_matrix_);
        return from_information(info_ - elim_vector_, schur);
    }
    // Walk back to the new first step; its Schur complement carries the
    // information of everything older.
    std::vector<const Node*> kept;
    const Node* node = frozen_.get();
    for (std::size_t i = 0; i + 1 < lag; ++i) {
        kept.push_back(node);
        node = node->prev.get();
    }
    const Node* first = kept.back();
    InfoBlocks b;
    b.diag.push_back(first->schur);
    b.info.push_back(first->schur_info);
    for (auto it = kept.rbegin() + 1; it != kept.rend(); ++it) {
        b.diag.push_back((*it)->diag);
        b.info.push_back((*it)->info);
        b.lower.push_back((*it)->lower);
    }
    b.diag.push_back(diag_);
    b.info.push_back(info_);
    b.lower.push_back(lower_);
    return from_blocks(b);
}

Vector InfoGaussian::dense_info() const {
    const auto b = blocks();
    const auto n = static_cast<Eigen::Index>(state_dim());
    Vector y(static_cast<Eigen::Index>(length_) * n);
    for (std::size_t t = 0; t < length_; ++t) {
        y.segment(static_cast<Eigen::Index>(t) * n, n) = b.info[t];
    }
    return y;
}

Matrix InfoGaussian::dense_info_matrix() const {
    const auto b = blocks();
    const auto n = static_cast<Eigen::Index>(state_dim());
    const auto dim = static_cast<Eigen::Index>(length_) * n;
    Matrix y = Matrix::Zero(dim, dim);
    for (std::size_t t = 0; t < length_; ++t) {
        const auto o = static_cast<Eigen::Index>(t) * n;
        y.block(o, o, n, n) = b.diag[t];
        if (t + 1 < length_) {
            y.block(o + n, o, n, n) = b.lower[t];
            y.block(o, o + n, n, n) = b.lower[t].transpose();
        }
    }
    return y;
}

std::vector<std::vector<bool>> InfoGaussian::block_pattern() const {
    const Matrix y = dense_info_matrix();
    const auto n = static_cast<Eigen::Index>(state_dim());
    std::vector<std::vector<bool>> grid(length_, std::vector<bool>(length_, false));
    for (std::size_t r = 0; r < length_; ++r) {
        for (std::size_t c = 0; c < length_; ++c) {
            const auto blk = y.block(static_cast<Eigen::Index>(r) * n,
                                     static_cast<Eigen::Index>(c) * n, n, n);
            grid[r][c] = (blk.array() != 0.0).any();
        }
    }
    return grid;
}

std::size_t InfoGaussian::nonzero_block_count() const {
    std::size_t count = 0;
    for (const auto& row : block_pattern()) {
        for (bool nz : row) count += nz ? 1 : 0;
    }
    return count;
}

std::string InfoGaussian::pattern_string() const {
    std::ostringstream os;
    for (const auto& row : block_pattern()) {
        for (bool nz : row) os << (nz ? 'X' : '.');
        os << '\n';
    }
    return os.str();
}

double log_gaussian_density(const Vector& z, const Vector& mean, const Matrix& cov) {
    auto llt = checked_cholesky(symmetrized(cov), "log_gaussian_density");
    const Vector white = llt.matrixL().solve(z - mean);
    const Matrix& l = llt.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    const double k = static_cast<double>(z.size());
    return -0.5 * (k * std::log(2.0 * std::numbers::pi) + log_det + white.squaredNorm());
}

double predictive_likelihood(const InfoGaussian& g, const Matrix& obs, const Matrix& noise_cov,
                             const Vector& z) {
    if (obs.cols() != static_cast<Eigen::Index>(g.state_dim()) || obs.rows() != z.size() ||
        noise_cov.rows() != z.size()) {
        throw std::invalid_argument("predictive_likelihood: dimension mismatch");
    }
    const auto m = g.last_step_marginal();
    return log_gaussian_density(z, obs * m.mean, obs * m.cov * obs.transpose() + noise_cov);
}

}  // namespace tpmbm
