#include "hjh/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hjh/errors.hpp"
#include "hjh/numerical_hamiltonian.hpp"

namespace hjh {

BoxGrid::BoxGrid(int dim, Vec lo, Vec hi, int intervals) : dim_(dim), n_(intervals), lo_(lo), hi_(hi) {
  if (dim != 1 && dim != 2) throw ConfigError("box dimension must be 1 or 2");
  if (intervals < 2) throw ConfigError("box needs at least two intervals per axis (nonempty interior)");
  for (int k = 0; k < dim; ++k) {
    if (!(hi[k] > lo[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k]))
      throw ConfigError("box bounds must be finite with lo < hi");
    h_[k] = (hi[k] - lo[k]) / intervals;
  }
  if (dim == 1) lo_[1] = hi_[1] = 0.0;
  const auto p = static_cast<std::size_t>(n_ + 1);
  size_ = dim == 1 ? p : p * p;
}

std::size_t BoxGrid::index(int i, int j) const noexcept {
  return static_cast<std::size_t>(j) * (n_ + 1) + static_cast<std::size_t>(i);
}

std::array<int, 2> BoxGrid::coords(std::size_t k) const noexcept {
  const auto p = static_cast<std::size_t>(n_ + 1);
  if (dim_ == 1) return {static_cast<int>(k), 0};
  return {static_cast<int>(k % p), static_cast<int>(k / p)};
}

Vec BoxGrid::point(std::size_t k) const noexcept {
  const auto c = coords(k);
  Vec x{lo_[0] + c[0] * h_[0], 0.0};
  if (dim_ == 2) x[1] = lo_[1] + c[1] * h_[1];
  return x;
}

bool BoxGrid::is_boundary(std::size_t k) const noexcept {
  const auto c = coords(k);
  for (int a = 0; a < dim_; ++a)
    if (c[a] == 0 || c[a] == n_) return true;
  return false;
}

GridFunction side_data(const BoxGrid& grid, const std::vector<double>& sides) {
  if (static_cast<int>(sides.size()) != 2 * grid.dim()) throw ConfigError("side data needs 2 values per axis");
  for (double s : sides)
    if (!std::isfinite(s)) throw ConfigError("boundary data must be finite");
  GridFunction g(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = grid.coords(k);
    double v = INFINITY;
    for (int a = 0; a < grid.dim(); ++a) {
      if (c[a] == 0) v = std::min(v, sides[2 * a]);
      if (c[a] == grid.intervals()) v = std::min(v, sides[2 * a + 1]);
    }
    g[k] = std::isfinite(v) ? v : 0.0;
  }
  return g;
}

namespace {

double wrap(double x) { return x - std::floor(x); }

// Sup over the cell of |H_i(xi, 0)|.
double zero_slope_sup(const HamiltonianSpec& spec, int i) {
  const int n = spec.dim() == 1 ? 512 : 96;
  double s = 0.0;
  for (int b = 0; b < (spec.dim() == 1 ? 1 : n); ++b)
    for (int a = 0; a < n; ++a) s = std::max(s, std::abs(spec.eval(i, {(a + 0.5) / n, (b + 0.5) / n}, {0.0, 0.0})));
  return s;
}

// Pseudo-time march u <- u - dt R(u), min-projected onto g at the boundary.
// flux(i, k, pm, pp) evaluates the numerical Hamiltonian; coupling(i, k, u) the zeroth-order part.
template <class Flux, class Coupling, class Bound>
DirichletSolution march(const BoxGrid& grid, const std::vector<GridFunction>& g, double tol,
                        const DirichletOptions& opt, double zeroth_order, Flux flux, Coupling coupling, Bound bound_for) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(opt.cfl > 0.0 && opt.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  const int m = static_cast<int>(g.size());
  const int dim = grid.dim();
  const int n = grid.intervals();
  const auto size = static_cast<long>(grid.size());
  const auto stride = static_cast<long>(n + 1);

  DirichletSolution sol{grid, std::vector<GridFunction>(m, GridFunction(grid.size(), 0.0))};
  std::vector<GridFunction> next = sol.components;
  for (int i = 0; i < m; ++i)
    for (long k = 0; k < size; ++k)
      if (grid.is_boundary(k)) sol.components[i][k] = g[i][k];

  double radius = std::max(opt.r_grad, 1e-3);
  auto step_size = [&](double r) {
    double s = 1.0 + zeroth_order;
    for (int a = 0; a < dim; ++a) s += bound_for(r) / grid.spacing(a);
    return opt.cfl / s;
  };
  double dt = step_size(radius);
  std::vector<double> history;

  for (long iter = 0;; ++iter) {
    double seen = 0.0, inc = 0.0;
    for (int i = 0; i < m; ++i) {
      const double* u = sol.components[i].data();
      double* out = next[i].data();
#pragma omp parallel for schedule(static) reduction(max : seen, inc)
      for (long k = 0; k < size; ++k) {
        const long c0 = dim == 1 ? k : k % stride;
        const long c1 = dim == 1 ? 0 : k / stride;
        const long c[2] = {c0, c1};
        const long step[2] = {1, stride};
        Vec pm{0.0, 0.0}, pp{0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
          const double ih = 1.0 / grid.spacing(a);
          pm[a] = c[a] == 0 ? -INFINITY : (u[k] - u[k - step[a]]) * ih;
          pp[a] = c[a] == n ? INFINITY : (u[k + step[a]] - u[k]) * ih;
          if (std::isfinite(pm[a])) seen = std::max(seen, std::abs(pm[a]));
          if (std::isfinite(pp[a])) seen = std::max(seen, std::abs(pp[a]));
        }
        const double r = u[k] + flux(i, k, pm, pp) + coupling(i, k, sol.components);
        double v = u[k] - dt * r;
        const bool edge = (c0 == 0 || c0 == n) || (dim == 2 && (c1 == 0 || c1 == n));
        if (edge) v = std::min(v, g[i][k]);
        out[k] = v;
        inc = std::max(inc, std::abs(v - u[k]));
      }
    }
    sol.max_gradient = std::max(sol.max_gradient, seen);
    if (!std::isfinite(inc)) throw NonConvergence("Dirichlet iteration diverged", history);
    if (seen > radius) {
      // The step was sized for a smaller gradient range: discard it and shrink dt.
      radius = 1.5 * seen;
      dt = step_size(radius);
      continue;
    }
    sol.components.swap(next);
    const double res = inc / dt;
    if (opt.history_stride > 0 && iter % opt.history_stride == 0) history.push_back(res);
    if (res < tol) {
      sol.iterations = iter + 1;
      sol.residual = res;
      break;
    }
    if (iter >= opt.max_iterations) {
      std::ostringstream os;
      os << "Dirichlet iteration cap reached (" << opt.max_iterations << " sweeps, residual " << res << ")";
      throw NonConvergence(os.str(), history);
    }
  }
  return sol;
}

}  // namespace

void DirichletProblem::validate() const {
  if (spec.m() != coupling.m()) throw ConfigError("Hamiltonian and coupling disagree on the component count");
  if (spec.dim() != grid.dim()) throw ConfigError("Hamiltonian and box disagree on the dimension");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (static_cast<int>(boundary.size()) != spec.m()) throw ConfigError("need one boundary datum per component");
  for (const auto& gi : boundary) {
    if (gi.size() != grid.size()) throw ConfigError("boundary datum does not match the box grid");
    for (std::size_t k = 0; k < gi.size(); ++k)
      if (grid.is_boundary(k) && !std::isfinite(gi[k])) throw ConfigError("boundary data must be finite");
  }
}

double DirichletProblem::uniform_bound() const {
  double out = 0.0;
  for (int i = 0; i < spec.m(); ++i) {
    double gs = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (grid.is_boundary(k)) gs = std::max(gs, std::abs(boundary[i][k]));
    out = std::max(out, zero_slope_sup(spec, i) + gs);
  }
  return out;
}

double DirichletSolution::lipschitz(int i) const {
  const auto& u = components.at(i);
  double out = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = grid.coords(k);
    if (c[0] < grid.intervals()) out = std::max(out, std::abs(u[k + 1] - u[k]) / grid.spacing(0));
    if (grid.dim() == 2 && c[1] < grid.intervals())
      out = std::max(out, std::abs(u[grid.index(c[0], c[1] + 1)] - u[k]) / grid.spacing(1));
  }
  return out;
}

DirichletSolution solve_dirichlet_eps(const DirichletProblem& problem, double tol, const DirichletOptions& options) {
  problem.validate();
  const auto& spec = problem.spec;
  const auto& grid = problem.grid;
  const int m = spec.m();
  const int dim = spec.dim();
  const double inv_eps = 1.0 / problem.epsilon;

  std::vector<SampledComponent> coeffs(m);
  for (int i = 0; i < m; ++i) {
    const auto& c = spec.component(i);
    coeffs[i].profile = c.profile;
    coeffs[i].speed.resize(grid.size());
    coeffs[i].potential.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vec x = grid.point(k);
      const Vec xi{wrap(x[0] * inv_eps), dim == 2 ? wrap(x[1] * inv_eps) : 0.0};
      coeffs[i].speed[k] = c.speed(xi);
      coeffs[i].potential[k] = c.potential(xi);
    }
  }
  const auto& K = problem.coupling;
  double off = 0.0;
  for (int i = 0; i < m; ++i) off = std::max(off, 1.0 - K(i, i));

  auto flux = [&](int i, long k, const Vec& pm, const Vec& pp) {
    return flux_kernel(coeffs[i].profile, dim, coeffs[i].speed[k], coeffs[i].potential[k], pm, pp,
                       FluxKind::godunov, 0.0);
  };
  auto coupling = [&](int i, long k, const std::vector<GridFunction>& u) {
    double s = u[i][k];
    for (int j = 0; j < m; ++j) s -= K(i, j) * u[j][k];
    return inv_eps * s;
  };
  auto bound = [&](double r) { return spec.flux_bound(r); };
  return march(grid, problem.boundary, tol, options, off * inv_eps, flux, coupling, bound);
}

DirichletSolution solve_dirichlet_effective(const EffectiveTable& table, const BoxGrid& grid, const GridFunction& g_bar,
                                            double tol, const DirichletOptions& options) {
  if (table.lattice().dim != grid.dim()) throw ConfigError("table and box disagree on the dimension");
  if (!table.complete()) throw ConfigError("effective table has gaps");
  if (g_bar.size() != grid.size()) throw ConfigError("boundary datum does not match the box grid");
  double slope = 0.0;
  for (int a = 0; a < grid.dim(); ++a) slope = std::max(slope, table.max_slope(a));
  auto flux = [&](int, long, const Vec& pm, const Vec& pp) { return table.godunov(pm, pp); };
  auto coupling = [](int, long, const std::vector<GridFunction>&) { return 0.0; };
  // The interpolant is Lipschitz with its largest lattice slope, whatever the gradient range.
  auto bound = [&](double) { return slope; };
  DirichletOptions opt = options;
  opt.r_grad = INFINITY;
  return march(grid, std::vector<GridFunction>{g_bar}, tol, opt, 0.0, flux, coupling, bound);
}

GridFunction effective_boundary_datum(const std::vector<GridFunction>& g) {
  if (g.empty()) throw ConfigError("need at least one boundary datum");
  GridFunction out = g.front();
  for (const auto& gi : g) {
    if (gi.size() != out.size()) throw ConfigError("boundary data sizes differ");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::min(out[k], gi[k]);
  }
  return out;
}

void write_dirichlet_csv(std::ostream& os, const DirichletSolution& solution) {
  const bool two = solution.grid.dim() == 2;
  os << (two ? "x,y,component,value\n" : "x,component,value\n");
  os.precision(17);
  for (int i = 0; i < solution.m(); ++i)
    for (std::size_t k = 0; k < solution.grid.size(); ++k) {
      const Vec x = solution.grid.point(k);
      os << x[0] << ',';
      if (two) os << x[1] << ',';
      os << i + 1 << ',' << solution.components[i][k] << '\n';
    }
}

}  // namespace hjh
