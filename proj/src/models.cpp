#include "tpmbm/models.hpp"

#include <cmath>
#include <stdexcept>

namespace tpmbm {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0, 1]");
}

void check_symmetric(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw std::invalid_argument(std::string(what) + " is not symmetric");
    }
}

Matrix inverse_spd(const Matrix& m, const char* what) {
    auto llt = checked_cholesky(symmetrized(m), what);
    return symmetrized(llt.solve(Matrix::Identity(m.rows(), m.cols())));
}

}  // namespace

MotionModel::MotionModel(Matrix transition, Matrix noise_cov, double survival_prob)
    : transition_(std::move(transition)),
      noise_cov_(std::move(noise_cov)),
      survival_prob_(survival_prob) {
    if (transition_.rows() != transition_.cols() || transition_.rows() == 0 ||
        noise_cov_.rows() != transition_.rows()) {
        throw std::invalid_argument("MotionModel: dimension mismatch");
    }
    check_symmetric(noise_cov_, "MotionModel Q");
    check_probability(survival_prob_, "MotionModel survival probability");
    noise_cov_ = symmetrized(noise_cov_);
    noise_info_ = inverse_spd(noise_cov_, "MotionModel Q");
}

MeasurementModel::MeasurementModel(Matrix obs, Matrix noise_cov, double detection_prob)
    : obs_(std::move(obs)), noise_cov_(std::move(noise_cov)), detection_prob_(detection_prob) {
    if (obs_.rows() == 0 || noise_cov_.rows() != obs_.rows()) {
        throw std::invalid_argument("MeasurementModel: dimension mismatch");
    }
    check_symmetric(noise_cov_, "MeasurementModel R");
    check_probability(detection_prob_, "MeasurementModel detection probability");
    noise_cov_ = symmetrized(noise_cov_);
    noise_info_ = inverse_spd(noise_cov_, "MeasurementModel R");
}

void BirthModel::validate(std::size_t state_dim) const {
    for (const auto* list : {&per_step, &initial}) {
        for (const auto& c : *list) {
            if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
                throw std::invalid_argument("BirthModel: weight must be finite and nonnegative");
            }
            if (c.mean.size() != static_cast<Eigen::Index>(state_dim) ||
                c.cov.rows() != c.mean.size() || c.cov.cols() != c.mean.size()) {
                throw std::invalid_argument("BirthModel: component dimension mismatch");
            }
            check_symmetric(c.cov, "BirthModel covariance");
        }
    }
}

void ClutterModel::validate(std::size_t meas_dim) const {
    if (!(rate_density >= 0.0) || !std::isfinite(rate_density)) {
        throw std::invalid_argument("ClutterModel: rate density must be finite and nonnegative");
    }
    if (lower.size() != meas_dim || upper.size() != meas_dim) {
        throw std::invalid_argument("ClutterModel: region dimension mismatch");
    }
    for (std::size_t i = 0; i < meas_dim; ++i) {
        if (!(lower[i] < upper[i])) throw std::invalid_argument("ClutterModel: region bounds not ordered");
    }
}

double ClutterModel::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
    return v;
}

bool ClutterModel::contains(const Vector& z) const {
    if (z.size() != static_cast<Eigen::Index>(lower.size())) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        const double x = z(static_cast<Eigen::Index>(i));
        if (x < lower[i] || x > upper[i]) return false;
    }
    return true;
}

MotionModel constant_velocity(double sigma_v, double dt, double survival_prob) {
    if (!(sigma_v > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("constant_velocity: sigma_v and dt must be positive");
    }
    Matrix f = Matrix::Identity(4, 4);
    f(0, 2) = dt;
    f(1, 3) = dt;
    const double q = sigma_v * sigma_v;
    Matrix cov = Matrix::Zero(4, 4);
    for (int axis = 0; axis < 2; ++axis) {
        cov(axis, axis) = q * dt * dt * dt / 3.0;
        cov(axis, axis + 2) = q * dt * dt / 2.0;
        cov(axis + 2, axis) = q * dt * dt / 2.0;
        cov(axis + 2, axis + 2) = q * dt;
    }
    return MotionModel(f, cov, survival_prob);
}

MeasurementModel position_measurement(const Matrix& noise_cov, double detection_prob) {
    Matrix h = Matrix::Zero(2, 4);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return MeasurementModel(h, noise_cov, detection_prob);
}

TrajectoryMixture birth_intensity_at(const BirthModel& birth, Time k) {
    const auto& source = (k == 0 && !birth.initial.empty()) ? birth.initial : birth.per_step;
    TrajectoryMixture out;
    for (const auto& c : source) {
        out.components.push_back(
            MixtureComponent{c.weight, k, k, InfoGaussian::from_moments(c.mean, c.cov)});
    }
    return out;
}

double clutter_density(const ClutterModel& clutter, const Vector& z) {
    return clutter.contains(z) ? clutter.rate_density : 0.0;
}

}  // namespace tpmbm
