#include "hjh/numerical_hamiltonian.hpp"

#include "hjh/errors.hpp"
#include "hjh/state.hpp"

namespace hjh {

const char* to_string(FluxKind f) { return f == FluxKind::godunov ? "godunov" : "lax_friedrichs"; }

FluxKind flux_from_string(const std::string& s) {
  if (s == "godunov") return FluxKind::godunov;
  if (s == "lax_friedrichs") return FluxKind::lax_friedrichs;
  throw ConfigError("unknown flux '" + s + "'");
}

double numerical_hamiltonian(const HamiltonianSpec& spec, int i, const Vec& xi, const Vec& p_minus,
                             const Vec& p_plus, double theta) {
  const auto& c = spec.component(i);
  return flux_kernel(c.profile, spec.dim(), c.speed(xi), c.potential(xi), p_minus, p_plus, FluxKind::lax_friedrichs,
                     theta);
}

double godunov_hamiltonian(const HamiltonianSpec& spec, int i, const Vec& xi, const Vec& p_minus, const Vec& p_plus) {
  const auto& c = spec.component(i);
  return c.speed(xi) * godunov_profile(c.profile, spec.dim(), p_minus, p_plus) - c.potential(xi);
}

StateField::StateField(TorusGrid g, std::vector<GridFunction> c, double t)
    : grid(g), components(std::move(c)), time(t) {
  validate();
}

void StateField::validate() const {
  if (components.empty()) throw ConfigError("state needs at least one component");
  for (const auto& c : components) {
    if (c.size() != grid.size()) throw ConfigError("state component size does not match its grid");
    for (double v : c)
      if (!std::isfinite(v)) throw ConfigError("state contains a non-finite value");
  }
}

std::pair<Vec, Vec> upwind_gradients(const StateField& field, int i, std::size_t k) {
  const auto& u = field.components.at(i);
  const double h = field.grid.spacing();
  Vec pm{0.0, 0.0}, pp{0.0, 0.0};
  for (int axis = 0; axis < field.grid.dim(); ++axis) {
    pm[axis] = (u[k] - u[field.grid.neighbor(k, axis, -1)]) / h;
    pp[axis] = (u[field.grid.neighbor(k, axis, 1)] - u[k]) / h;
  }
  return {pm, pp};
}

}  // namespace hjh
