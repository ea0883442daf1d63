#include <algorithm>
#include <cmath>

#include "hjh/errors.hpp"
#include "hjh/evolution.hpp"

namespace hjh {

double barrier_constant(const HamiltonianSpec& spec, const TorusGrid& grid, double epsilon, double radius) {
  // sup over xi at the gridpoints (x/eps) and over |p| <= radius on a lattice
  const int np = spec.dim() == 1 ? 129 : 41;
  std::vector<Vec> ps;
  for (int a = 0; a < np; ++a) {
    const double pa = radius * (-1.0 + 2.0 * a / (np - 1));
    if (spec.dim() == 1) {
      ps.push_back({pa, 0.0});
      continue;
    }
    for (int b = 0; b < np; ++b) {
      const double pb = radius * (-1.0 + 2.0 * b / (np - 1));
      if (pa * pa + pb * pb <= radius * radius * (1.0 + 1e-12)) ps.push_back({pa, pb});
    }
  }
  // The ring |p| = radius matters for norm-type growth; add it explicitly in 2D.
  if (spec.dim() == 2) {
    for (int d = 0; d < 64; ++d) {
      const double ang = 2.0 * M_PI * d / 64;
      ps.push_back({radius * std::cos(ang), radius * std::sin(ang)});
    }
  }
  double c = 0.0;
  for (int i = 0; i < spec.m(); ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vec x = grid.point(k);
      const Vec xi{x[0] / epsilon, x[1] / epsilon};
      for (const Vec& p : ps) c = std::max(c, std::abs(spec.eval(i, xi, p)));
    }
  }
  return c;
}

BarrierPair build_barriers(const EpsSystemProblem& problem, const std::vector<double>& times) {
  double r = 0.0;
  for (const auto& f : problem.initial) r += discrete_lipschitz(problem.grid, f);
  BarrierPair b = build_barriers(problem, times, barrier_constant(problem.spec, problem.grid, problem.epsilon, r));
  b.gradient_radius = r;
  return b;
}

BarrierPair build_barriers(const EpsSystemProblem& problem, const std::vector<double>& times, double constant) {
  problem.validate();
  const int m = problem.spec.m();
  const GridFunction fbar = problem.averaged_initial();
  BarrierPair out;
  out.constant = constant;
  for (double t : times) {
    if (!(t >= 0.0)) throw ConfigError("barrier times must be nonnegative");
    const Eigen::MatrixXd prop = problem.coupling.propagator(t / problem.epsilon);
    std::vector<GridFunction> lo(m, GridFunction(problem.grid.size())), hi = lo;
    for (std::size_t k = 0; k < problem.grid.size(); ++k) {
      for (int i = 0; i < m; ++i) {
        double osc = 0.0;
        for (int j = 0; j < m; ++j) osc += prop(i, j) * (problem.initial[j][k] - fbar[k]);
        const double base = t == 0.0 ? problem.initial[i][k] : fbar[k] + osc;
        lo[i][k] = base - constant * t;
        hi[i][k] = base + constant * t;
      }
    }
    out.lower.emplace_back(problem.grid, std::move(lo), t);
    out.upper.emplace_back(problem.grid, std::move(hi), t);
  }
  return out;
}

SandwichReport check_sandwich(const std::vector<StateField>& run, const BarrierPair& barriers, double slack) {
  if (run.size() != barriers.lower.size() || run.size() != barriers.upper.size())
    throw ConfigError("run and barriers have different sample counts");
  SandwichReport rep;
  rep.slack = slack;
  for (std::size_t s = 0; s < run.size(); ++s) {
    const auto& u = run[s];
    const auto& lo = barriers.lower[s];
    const auto& hi = barriers.upper[s];
    if (!(u.grid == lo.grid) || std::abs(u.time - lo.time) > 1e-12 || u.m() != lo.m())
      throw ConfigError("run and barriers are not on matching grids and times");
    for (int i = 0; i < u.m(); ++i) {
      for (std::size_t k = 0; k < u.grid.size(); ++k) {
        const double below = lo.components[i][k] - slack - u.components[i][k];
        const double above = u.components[i][k] - hi.components[i][k] - slack;
        rep.max_lower_violation = std::max(rep.max_lower_violation, below);
        rep.max_upper_violation = std::max(rep.max_upper_violation, above);
        if (below > 0.0 || above > 0.0) ++rep.violations;
        ++rep.checked;
      }
    }
  }
  return rep;
}

}  // namespace hjh
