#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "nbscatter/integrator.hpp"
#include "nbscatter/scattering.hpp"

namespace nbs {

using Json = nlohmann::json;

// Trajectory CSV, column order fixed and versioned in the header comment:
// tau, t, rho, v, s[0..nd-1], w[0..nd-1]; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int nd);
Trajectory read_trajectory_csv(std::istream& is, int nd);

Json trajectory_metadata(const Trajectory& traj);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

Json to_json(const ManifoldParams& mp);
ManifoldParams manifold_from_json(const Json& j);

Json to_json(const ChazyParameters& cp);
Json to_json(const OrbitParameter& gamma);
Json to_json(const ScatteringResult& res);
ScatteringResult scattering_from_json(const Json& j);

std::string format_double(double x);  // 17 significant digits

}  // namespace nbs
