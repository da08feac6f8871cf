#pragma once

#include "tpmbm/pmbm_density.hpp"

#include <json.hpp>

namespace tpmbm {

using Json = nlohmann::json;

/// Matrices are row-major arrays of rows; vectors are flat arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json info_gaussian_to_json(const InfoGaussian& g);
InfoGaussian info_gaussian_from_json(const Json& j);

Json mixture_to_json(const TrajectoryMixture& m);
TrajectoryMixture mixture_from_json(const Json& j);

Json trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const Json& j);

/// PMBM density document. Log weights of -inf are written as null.
Json density_to_json(const PmbmDensity& d);
PmbmDensity density_from_json(const Json& j);

}  // namespace tpmbm
