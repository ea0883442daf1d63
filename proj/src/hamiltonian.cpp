#include "hjh/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hjh/errors.hpp"

namespace hjh {

const char* to_string(Profile p) {
  switch (p) {
    case Profile::quadratic: return "quadratic";
    case Profile::norm: return "norm";
    case Profile::double_well: return "double_well";
  }
  return "?";
}

Coefficient Coefficient::constant(double value) {
  Coefficient c;
  c.name = "constant";
  c.is_constant = true;
  c.constant_value = value;
  c.fn = [value](const Vec&) { return value; };
  return c;
}

double Component::eval(const Vec& xi, const Vec& p, int dim) const {
  const double s = dim == 1 ? p[0] * p[0] : p[0] * p[0] + p[1] * p[1];
  return speed(xi) * profile_value(profile, s) - potential(xi);
}

std::string Component::describe() const {
  std::ostringstream os;
  os << to_string(profile) << "(speed=" << speed.name;
  if (speed.is_constant) os << ":" << speed.constant_value;
  os << ", potential=" << potential.name;
  if (potential.is_constant) os << ":" << potential.constant_value;
  os << ")";
  return os.str();
}

HamiltonianSpec::HamiltonianSpec(int dim, std::vector<Component> components)
    : dim_(dim), components_(std::move(components)) {
  if (dim != 1 && dim != 2) throw ConfigError("Hamiltonian dimension must be 1 or 2");
  if (components_.empty() || components_.size() > 8) throw ConfigError("Hamiltonian needs 1..8 components");
  const TorusGrid probe(dim, dim == 1 ? 512 : 128);
  for (const auto& c : components_) {
    if (!c.speed.fn || !c.potential.fn) throw ConfigError("component coefficient is empty");
    Stats s{c.speed.is_constant ? c.speed.constant_value : INFINITY,
            c.speed.is_constant ? c.speed.constant_value : -INFINITY,
            c.potential.is_constant ? c.potential.constant_value : INFINITY,
            c.potential.is_constant ? c.potential.constant_value : -INFINITY};
    if (!c.speed.is_constant || !c.potential.is_constant) {
      for (std::size_t k = 0; k < probe.size(); ++k) {
        const Vec xi = probe.point(k);
        const double a = c.speed(xi), v = c.potential(xi);
        if (!std::isfinite(a) || !std::isfinite(v)) throw ConfigError("coefficient is not finite on the cell");
        s.a_min = std::min(s.a_min, a);
        s.a_max = std::max(s.a_max, a);
        s.v_min = std::min(s.v_min, v);
        s.v_max = std::max(s.v_max, v);
      }
    }
    if (s.a_min < 0.0) throw ConfigError("speed coefficient must be nonnegative");
    stats_.push_back(s);
  }
}

bool HamiltonianSpec::convex_in_p(int i) const { return components_.at(i).profile != Profile::double_well; }

double HamiltonianSpec::lip_p(int i) const {
  return components_.at(i).profile == Profile::norm ? stats_.at(i).a_max : INFINITY;
}

bool HamiltonianSpec::separable(int i) const {
  const auto& c = components_.at(i);
  return c.profile == Profile::quadratic && c.speed.is_constant && c.speed.constant_value == 1.0;
}

bool HamiltonianSpec::homogeneous_degree_one(int i) const {
  const auto& c = components_.at(i);
  return c.profile == Profile::norm && c.potential.is_constant && c.potential.constant_value == 0.0;
}

double HamiltonianSpec::flux_bound(int i, double r_grad) const {
  const double a = stats_.at(i).a_max;
  switch (components_.at(i).profile) {
    case Profile::quadratic: return 2.0 * a * r_grad;
    case Profile::norm: return a;
    case Profile::double_well: {
      // sup over r in [0, R] of |d/dr (r^2 - 1)^2| = 4 r |r^2 - 1|
      double g = 4.0 * r_grad * std::abs(r_grad * r_grad - 1.0);
      const double r0 = 1.0 / std::sqrt(3.0);
      if (r_grad >= r0) g = std::max(g, 4.0 * r0 * (1.0 - r0 * r0));
      return a * g;
    }
  }
  return INFINITY;
}

double HamiltonianSpec::flux_bound(double r_grad) const {
  double t = 0.0;
  for (int i = 0; i < m(); ++i) t = std::max(t, flux_bound(i, r_grad));
  return t;
}

double HamiltonianSpec::lagrangian(int i, const Vec& xi, const Vec& q) const {
  const auto& c = components_.at(i);
  const double a = c.speed(xi), v = c.potential(xi);
  const double qn = norm(q, dim_);
  switch (c.profile) {
    case Profile::quadratic:
      if (a > 0.0) return qn * qn / (4.0 * a) + v;
      return qn == 0.0 ? v : kInfiniteCost;
    case Profile::norm:
      return qn <= a * (1.0 + 1e-12) + 1e-14 ? v : kInfiniteCost;
    case Profile::double_well:
      break;
  }
  throw ConfigError("Lagrangian requested for a nonconvex component");
}

Vec HamiltonianSpec::velocity(int i, const Vec& xi, const Vec& p) const {
  const auto& c = components_.at(i);
  const double a = c.speed(xi);
  const double pn = norm(p, dim_);
  double f = 0.0;  // dH/dp = f p
  switch (c.profile) {
    case Profile::quadratic: f = 2.0 * a; break;
    case Profile::norm: f = pn > 1e-12 ? a / pn : 0.0; break;
    case Profile::double_well: f = 4.0 * a * (pn * pn - 1.0); break;
  }
  return {f * p[0], dim_ == 2 ? f * p[1] : 0.0};
}

std::string HamiltonianSpec::describe() const {
  std::ostringstream os;
  os << "dim=" << dim_;
  for (int i = 0; i < m(); ++i) os << "; H" << (i + 1) << "=" << components_[i].describe();
  return os.str();
}

std::vector<double> legendre_transform(const HamiltonianSpec& spec, int i, const Vec& xi,
                                       const std::vector<Vec>& q_samples, double p_radius, int lattice_points,
                                       double cap) {
  if (!spec.convex_in_p(i)) throw ConfigError("Legendre transform requires a convex component");
  if (!(p_radius > 0.0) || lattice_points < 3) throw ConfigError("Legendre lattice needs p_radius > 0 and >= 3 points");
  const int dim = spec.dim();
  const int n = dim == 1 ? lattice_points : std::min(lattice_points, 401);
  const double step = 2.0 * p_radius / (n - 1);
  std::vector<Vec> ps;
  std::vector<double> hs;
  std::vector<bool> edge;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < (dim == 1 ? 1 : n); ++b) {
      const Vec p{-p_radius + a * step, dim == 1 ? 0.0 : -p_radius + b * step};
      ps.push_back(p);
      hs.push_back(spec.eval(i, xi, p));
      edge.push_back(a == 0 || a == n - 1 || (dim == 2 && (b == 0 || b == n - 1)));
    }
  }
  const bool lipschitz = std::isfinite(spec.lip_p(i));
  std::vector<double> out;
  out.reserve(q_samples.size());
  for (const Vec& q : q_samples) {
    double best = -INFINITY;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const double val = dot(ps[k], q, dim) - hs[k];
      if (val > best) {
        best = val;
        arg = k;
      }
    }
    if (best > cap) {
      out.push_back(kInfiniteCost);
    } else if (edge[arg]) {
      // Linear growth in p means the supremum is genuinely infinite.
      if (!lipschitz) throw BoundaryAttainment("Legendre maximizer on the lattice boundary; increase p_radius");
      out.push_back(kInfiniteCost);
    } else {
      out.push_back(best);
    }
  }
  return out;
}

double periodicity_defect(const HamiltonianSpec& spec, int samples, double p_range) {
  std::mt19937_64 rng(20240611ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0), pr(-p_range, p_range);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec xi{unit(rng), spec.dim() == 2 ? unit(rng) : 0.0};
    const Vec p{pr(rng), spec.dim() == 2 ? pr(rng) : 0.0};
    for (int i = 0; i < spec.m(); ++i) {
      const double h0 = spec.eval(i, xi, p);
      for (int k = 0; k < spec.dim(); ++k) {
        Vec shifted = xi;
        shifted[k] += 1.0;
        worst = std::max(worst, std::abs(spec.eval(i, shifted, p) - h0));
      }
    }
  }
  return worst;
}

bool coercivity_probe(const HamiltonianSpec& spec, double r_max, int samples) {
  const int dirs = spec.dim() == 1 ? 2 : 8;
  for (int s = 0; s < samples; ++s) {
    const Vec xi{(s + 0.5) / samples, spec.dim() == 2 ? std::fmod((s * 0.618034), 1.0) : 0.0};
    for (int i = 0; i < spec.m(); ++i) {
      const double h0 = spec.eval(i, xi, {0.0, 0.0});
      for (int d = 0; d < dirs; ++d) {
        Vec p{};
        if (spec.dim() == 1) {
          p = {d == 0 ? r_max : -r_max, 0.0};
        } else {
          const double ang = 2.0 * M_PI * d / dirs;
          p = {r_max * std::cos(ang), r_max * std::sin(ang)};
        }
        if (!(spec.eval(i, xi, p) > h0)) return false;
      }
    }
  }
  return true;
}

std::vector<SampledComponent> sample_components(const HamiltonianSpec& spec, const TorusGrid& grid, double scale) {
  std::vector<SampledComponent> out;
  for (const auto& c : spec.components()) {
    SampledComponent s{c.profile, GridFunction(grid.size()), GridFunction(grid.size())};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vec x = grid.point(k);
      const Vec xi{x[0] * scale, x[1] * scale};
      s.speed[k] = c.speed(xi);
      s.potential[k] = c.potential(xi);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hjh
