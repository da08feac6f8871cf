#pragma once

#include "tpmbm/trajectory.hpp"

#include <vector>

namespace tpmbm {

/// Linear-Gaussian motion x_{k+1} = F x_k + N(0, Q) with constant survival probability.
class MotionModel {
public:
    MotionModel(Matrix transition, Matrix noise_cov, double survival_prob);

    [[nodiscard]] const Matrix& transition() const { return transition_; }
    [[nodiscard]] const Matrix& noise_cov() const { return noise_cov_; }
    /// Q^{-1}; requires Q to be positive definite.
    [[nodiscard]] const Matrix& noise_info() const { return noise_info_; }
    [[nodiscard]] double survival_prob() const { return survival_prob_; }
    [[nodiscard]] std::size_t state_dim() const { return static_cast<std::size_t>(transition_.rows()); }

private:
    Matrix transition_;
    Matrix noise_cov_;
    Matrix noise_info_;
    double survival_prob_;
};

/// Linear-Gaussian measurement z = H x + N(0, R) with constant detection probability.
class MeasurementModel {
public:
    MeasurementModel(Matrix obs, Matrix noise_cov, double detection_prob);

    [[nodiscard]] const Matrix& obs() const { return obs_; }
    [[nodiscard]] const Matrix& noise_cov() const { return noise_cov_; }
    [[nodiscard]] const Matrix& noise_info() const { return noise_info_; }
    [[nodiscard]] double detection_prob() const { return detection_prob_; }
    [[nodiscard]] std::size_t meas_dim() const { return static_cast<std::size_t>(obs_.rows()); }

private:
    Matrix obs_;
    Matrix noise_cov_;
    Matrix noise_info_;
    double detection_prob_;
};

struct BirthComponent {
    double weight = 0.0;
    Vector mean;
    Matrix cov;
};

/// PPP birth intensity. `per_step` applies at every k >= 1; at k = 0 the
/// `initial` components are used when given, else `per_step`.
struct BirthModel {
    std::vector<BirthComponent> per_step;
    std::vector<BirthComponent> initial;

    void validate(std::size_t state_dim) const;
};

/// Uniform clutter over an axis-aligned box.
struct ClutterModel {
    double rate_density = 0.0;       ///< lambda_FA per unit volume
    std::vector<double> lower, upper;  ///< box bounds, one per measurement dimension

    void validate(std::size_t meas_dim) const;
    [[nodiscard]] double volume() const;
    [[nodiscard]] bool contains(const Vector& z) const;
    /// Expected number of clutter measurements per scan.
    [[nodiscard]] double expected_count() const { return rate_density * volume(); }
};

/// Everything a tracker needs to know about the world.
struct ModelSet {
    MotionModel motion;
    MeasurementModel measurement;
    BirthModel birth;
    ClutterModel clutter;
};

/// 2-D constant-velocity model with state [px, py, vx, vy], continuous
/// white-noise acceleration of spectral density sigma_v^2 and sample time dt.
MotionModel constant_velocity(double sigma_v, double dt, double survival_prob);

/// Position measurement H = [I 0] for the constant-velocity state.
MeasurementModel position_measurement(const Matrix& noise_cov, double detection_prob);

/// Birth intensity at time k: one component per birth component with
/// birth_time = end_time = k and a single-step sequence density.
TrajectoryMixture birth_intensity_at(const BirthModel& birth, Time k);

/// lambda_FA inside the region, 0 outside.
double clutter_density(const ClutterModel& clutter, const Vector& z);

}  // namespace tpmbm
