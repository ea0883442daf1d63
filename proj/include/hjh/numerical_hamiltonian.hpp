#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "hjh/hamiltonian.hpp"

namespace hjh {

enum class FluxKind { godunov, lax_friedrichs };

const char* to_string(FluxKind f);
FluxKind flux_from_string(const std::string& s);

// H(xi, (p- + p+)/2) - theta/2 sum_k (p+_k - p-_k)
double numerical_hamiltonian(const HamiltonianSpec& spec, int i, const Vec& xi, const Vec& p_minus,
                             const Vec& p_plus, double theta);

// Bardi-Osher extremum: per axis min over [p-, p+] if p- <= p+, max over [p+, p-] otherwise.
double godunov_hamiltonian(const HamiltonianSpec& spec, int i, const Vec& xi, const Vec& p_minus,
                           const Vec& p_plus);

// Extremum of F over the box, the part of the Godunov flux that does not depend on xi.
// Infinite one-sided differences are allowed and mean "no information from that side".
inline double godunov_profile(Profile profile, int dim, const Vec& p_minus, const Vec& p_plus) {
  // Everything is a function of s_k = p_k^2, so each axis reduces to a range [lo_k, hi_k] of s_k
  // and a direction (min or max).
  double lo[2] = {0.0, 0.0}, hi[2] = {0.0, 0.0};
  bool take_min[2] = {true, true};
  for (int k = 0; k < dim; ++k) {
    double a = p_minus[k], b = p_plus[k];
    take_min[k] = a <= b;
    if (a > b) std::swap(a, b);
    lo[k] = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(a * a, b * b);
    hi[k] = std::max(a * a, b * b);
  }
  if (profile != Profile::double_well) {
    // F nondecreasing in s: each axis picks its own endpoint.
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += take_min[k] ? lo[k] : hi[k];
    return profile_value(profile, s);
  }
  auto f = [](double s) { return (s - 1.0) * (s - 1.0); };
  if (dim == 1) {
    if (take_min[0]) return (lo[0] <= 1.0 && hi[0] >= 1.0) ? 0.0 : std::min(f(lo[0]), f(hi[0]));
    return std::max(f(lo[0]), f(hi[0]));
  }
  // Inner extremum over axis 1, outer over axis 0; F convex in s keeps every case explicit.
  const double a2 = lo[1], b2 = hi[1];
  if (take_min[1]) {
    // m(s1) = dist(1 - s1, [a2, b2])^2, convex in s1
    auto m = [&](double s1) {
      const double t = 1.0 - s1;
      const double d = t < a2 ? a2 - t : (t > b2 ? t - b2 : 0.0);
      return d * d;
    };
    if (!take_min[0]) return std::max(m(lo[0]), m(hi[0]));
    if (hi[0] >= 1.0 - b2 && lo[0] <= 1.0 - a2) return 0.0;
    return std::min(m(lo[0]), m(hi[0]));
  }
  // M(s1) = max(F(s1 + a2), F(s1 + b2)), convex in s1
  auto big = [&](double s1) { return std::max(f(s1 + a2), f(s1 + b2)); };
  if (!take_min[0]) return std::max(big(lo[0]), big(hi[0]));
  const double star = std::clamp(1.0 - 0.5 * (a2 + b2), lo[0], hi[0]);
  return big(star);
}

inline double flux_kernel(Profile profile, int dim, double a, double v, const Vec& pm, const Vec& pp,
                          FluxKind kind, double theta) {
  if (kind == FluxKind::godunov) return a * godunov_profile(profile, dim, pm, pp) - v;
  double s = 0.0, diff = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double c = 0.5 * (pm[k] + pp[k]);
    s += c * c;
    diff += pp[k] - pm[k];
  }
  return a * profile_value(profile, s) - v - 0.5 * theta * diff;
}

}  // namespace hjh
