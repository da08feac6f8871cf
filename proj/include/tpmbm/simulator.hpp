#pragma once

#include "tpmbm/models.hpp"
#include "tpmbm/trajectory.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tpmbm {

/// Random engine used everywhere in the simulator: 64-bit Mersenne Twister
/// (std::mt19937_64, whose output sequence is fixed by the C++ standard),
/// with Boost.Random distributions, whose algorithms do not vary between
/// standard library implementations.
using Rng = std::mt19937_64;

/// Target with a fixed lifespan whose motion is sampled from the motion model.
struct ScriptedTarget {
    Time birth_time = 0;
    Time end_time = 0;
    Vector initial_state;
};

/// Target whose positions follow a smooth curve through timed waypoints
/// (cubic Hermite with Catmull-Rom tangents). Velocities are the curve's
/// derivative. The state is [px, py, vx, vy].
struct WaypointTarget {
    Time birth_time = 0;
    Time end_time = 0;
    std::vector<double> times;                    ///< strictly increasing
    std::vector<Eigen::Vector2d> positions;       ///< one per time
};

enum class TruthKind { stochastic, scripted, waypoints };

struct ScenarioSpec {
    TruthKind kind = TruthKind::stochastic;
    Time duration = 1;  ///< number of time steps, times 0 .. duration-1
    std::vector<ScriptedTarget> scripted;
    std::vector<WaypointTarget> waypoint_targets;

    void validate(const ModelSet& models) const;
};

struct SimulationOutput {
    std::vector<Trajectory> truth;
    std::vector<std::vector<Vector>> frames;  ///< measurements per time step
    std::vector<std::vector<int>> origins;    ///< truth index per measurement, -1 for clutter
};

/// Simulates truth and measurements. Stochastic truth draws Poisson births
/// from the birth intensity, survival with P_S and motion from the motion
/// model. Scripted and waypoint truth bypass birth and death. Each live target
/// is detected with P_D; clutter is Poisson(lambda_FA volume) with uniform
/// positions in the region; each frame is randomly permuted. Deterministic
/// for a given seed.
SimulationOutput simulate(const ScenarioSpec& spec, const ModelSet& models, std::uint64_t seed);

/// Trajectory through the waypoints, sampled at the integer times of its lifespan.
Trajectory waypoint_trajectory(const WaypointTarget& target);

/// Draws from N(mean, cov).
Vector sample_gaussian(Rng& rng, const Vector& mean, const Matrix& cov);

}  // namespace tpmbm
