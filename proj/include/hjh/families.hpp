#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hjh/hamiltonian.hpp"

namespace hjh {

// Closed-form coefficient fields on the unit cell, all 1-periodic.
namespace coeff {

Coefficient constant(double value);
// Speed of the explicit two-component example whose effective Hamiltonian is |P|.
Coefficient explicit_speed();
// 4 pi^2 sin^2 + cos - sin and 4 pi^2 cos^2 + sin - cos (argument 2 pi xi_0).
Coefficient rotation_well(int which);
// inside on [inner_lo, inner_hi], outside off (outer_lo, outer_hi), smootherstep between.
Coefficient interval_well(double inner_lo, double inner_hi, double outer_lo, double outer_hi,
                          double inside, double outside, int axis = 0);
Coefficient cosine_well(int axis, double center, double amplitude = 1.0);
// (1 + cos 2 pi xi_1)(1 + b cos 2 pi xi_0): vanishes exactly on xi_1 = 1/2.
Coefficient stripe_well(double modulation);
// Radial version of interval_well around center (periodic distance).
Coefficient disk_well(Vec center, double inner_radius, double outer_radius, double inside, double outside);
// Periodic linear interpolation of values on a uniform lattice (1D list or 2D rows).
Coefficient tabulated(int dim, std::vector<double> values, int points_per_axis);

double smootherstep(double t);

}  // namespace coeff

Coefficient make_coefficient(const nlohmann::json& j);
Component make_component(const nlohmann::json& j);
// {"dim": 1|2, "components": [...]}
HamiltonianSpec make_hamiltonian(const nlohmann::json& j);

std::vector<std::string> family_names();
std::vector<std::string> coefficient_names();

}  // namespace hjh
