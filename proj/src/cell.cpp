#include "hjh/cell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjh/errors.hpp"

namespace hjh {

namespace {


struct Residual {
  double mean = 0.0;
  double max_dev = 0.0;  // max |R - mean|
  double max_gradient = 0.0;
};

class CellIteration {
 public:
  CellIteration(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P, double delta,
                const CellOptions& opt)
      : spec_(spec), k_(k), P_(P), delta_(delta), opt_(opt), grid_(spec.dim(), opt.points_per_axis),
        coeffs_(sample_components(spec, grid_, 1.0)) {
    // The gradient P + Dv is at least |P| in some place, so start the bound there.
    const bool adaptive = opt.adaptive_bound && opt.flux == FluxKind::godunov;
    const double radius = adaptive ? std::max(0.5, 1.2 * norm(P, spec.dim())) : opt.r_grad;
    bound_ = spec.flux_bound(std::max(radius, norm(P, spec.dim()) * 1.05));
    if (!(bound_ > 0.0)) bound_ = 1.0;
    update_dt();
  }

  const TorusGrid& grid() const { return grid_; }

  // Residual of component i at gridpoint kk; g receives the largest one-sided gradient there.
  double local(const std::vector<GridFunction>& v, int i, long kk, double& g) const {
    const int dim = grid_.dim();
    const int n = grid_.points_per_axis();
    const double inv_h = 1.0 / grid_.spacing();
    const double* u = v[i].data();
    const auto& c = coeffs_[i];
    const int ix = dim == 1 ? static_cast<int>(kk) : static_cast<int>(kk % n);
    const int iy = dim == 1 ? 0 : static_cast<int>(kk / n);
    const long row = static_cast<long>(iy) * n;
    const long xl = row + (ix == 0 ? n - 1 : ix - 1);
    const long xr = row + (ix == n - 1 ? 0 : ix + 1);
    Vec pm{P_[0] + (u[kk] - u[xl]) * inv_h, 0.0};
    Vec pp{P_[0] + (u[xr] - u[kk]) * inv_h, 0.0};
    if (dim == 2) {
      const long yd = static_cast<long>(iy == 0 ? n - 1 : iy - 1) * n + ix;
      const long yu = static_cast<long>(iy == n - 1 ? 0 : iy + 1) * n + ix;
      pm[1] = P_[1] + (u[kk] - u[yd]) * inv_h;
      pp[1] = P_[1] + (u[yu] - u[kk]) * inv_h;
    }
    g = std::max({std::abs(pm[0]), std::abs(pp[0]), std::abs(pm[1]), std::abs(pp[1])});
    double coupling = (1.0 + delta_) * u[kk];
    for (int j = 0; j < spec_.m(); ++j) coupling -= k_(i, j) * v[j][kk];
    return flux_kernel(c.profile, dim, c.speed[kk], c.potential[kk], pm, pp, opt_.flux, bound_) + coupling;
  }

  Residual residual(const std::vector<GridFunction>& v, std::vector<GridFunction>& r) const {
    const int m = spec_.m();
    const auto size = static_cast<long>(grid_.size());
    double seen = 0.0;
    for (int i = 0; i < m; ++i) {
      double* out = r[i].data();
#pragma omp parallel for schedule(static) reduction(max : seen)
      for (long kk = 0; kk < size; ++kk) {
        double g = 0.0;
        out[kk] = local(v, i, kk, g);
        seen = std::max(seen, g);
      }
    }
    Residual res;
    res.max_gradient = seen;
    // Fixed-order reduction keeps the iteration independent of the thread count.
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += pairwise_sum(r[i]);
    res.mean = total / (static_cast<double>(m) * grid_.size());
    double dev = 0.0;
    for (int i = 0; i < m; ++i)
      for (double x : r[i]) dev = std::max(dev, std::abs(x - res.mean));
    res.max_dev = std::isfinite(res.mean) ? dev : res.mean;
    return res;
  }

  // In-place pass with the same monotone local step, visiting points in one of 2^dim orders.
  // Stops before any point whose gradient leaves the flux bound and returns false.
  bool sweep(std::vector<GridFunction>& v, long pass) {
    const int dim = grid_.dim();
    const int n = grid_.points_per_axis();
    const bool rev_x = pass & 1, rev_y = dim == 2 && ((pass >> 1) & 1);
    const double limit = gradient_limit_;
    for (int b = 0; b < (dim == 2 ? n : 1); ++b) {
      const int iy = rev_y ? n - 1 - b : b;
      for (int a = 0; a < n; ++a) {
        const long kk = static_cast<long>(iy) * n + (rev_x ? n - 1 - a : a);
        for (int i = 0; i < spec_.m(); ++i) {
          double g = 0.0;
          r_[i] = local(v, i, kk, g);
          if (g > limit) return false;
        }
        for (int i = 0; i < spec_.m(); ++i) v[i][kk] -= dt_ * r_[i];
      }
    }
    return true;
  }

  // Raise the flux bound when gradients leave the configured range; returns true if changed.
  bool adapt(double max_gradient) {
    const double need = spec_.flux_bound(max_gradient);
    if (need <= bound_) return false;
    bound_ = 1.2 * need;
    update_dt();
    return true;
  }

  double dt() const { return dt_; }

 private:
  void update_dt() {
    dt_ = opt_.cfl / (grid_.dim() * bound_ / grid_.spacing() + 1.0 + delta_);
    // largest gradient the current bound covers
    double lo = 0.0, hi = 1.0;
    while (hi < 1e8 && spec_.flux_bound(hi) <= bound_) hi *= 2.0;
    if (hi >= 1e8) {
      gradient_limit_ = INFINITY;
      return;
    }
    for (int s = 0; s < 60; ++s) (spec_.flux_bound(0.5 * (lo + hi)) <= bound_ ? lo : hi) = 0.5 * (lo + hi);
    gradient_limit_ = lo;
  }

  const HamiltonianSpec& spec_;
  const CouplingMatrix& k_;
  Vec P_;
  double delta_;
  CellOptions opt_;
  TorusGrid grid_;
  std::vector<SampledComponent> coeffs_;
  double bound_ = 1.0;
  double dt_ = 0.0;
  double gradient_limit_ = INFINITY;
  std::vector<double> r_ = std::vector<double>(spec_.m());
};

}  // namespace

CellSolution solve_cell_discounted(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P, double delta,
                                   double tol, const CellOptions& options, const std::vector<GridFunction>* warm_start) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0, 1]");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (spec.m() != k.m()) throw ConfigError("Hamiltonian and coupling disagree on the component count");
  const double h = 1.0 / options.points_per_axis;
  if (h > delta * options.h_factor * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "grid too coarse for delta " << delta << ": need h <= " << delta * options.h_factor;
    throw ConfigError(os.str());
  }
  CellIteration it(spec, k, P, delta, options);
  const TorusGrid& grid = it.grid();
  const int m = spec.m();
  std::vector<GridFunction> v(m, GridFunction(grid.size(), 0.0));
  if (warm_start) {
    if (static_cast<int>(warm_start->size()) != m) throw ConfigError("warm start has the wrong component count");
    for (int i = 0; i < m; ++i) {
      if ((*warm_start)[i].size() != grid.size()) throw ConfigError("warm start has the wrong grid");
      v[i] = (*warm_start)[i];
    }
  }
  std::vector<GridFunction> r(m, GridFunction(grid.size(), 0.0));
  std::vector<double> history;
  CellSolution sol;
  sol.P = P;
  sol.delta = delta;
  sol.grid = grid;
  long iter = 0;
  for (;; ++iter) {
    const Residual res = it.residual(v, r);
    sol.max_gradient = std::max(sol.max_gradient, res.max_gradient);
    // R(v + c) = R(v) + delta c: shifting by -mean/delta cancels the slow constant mode exactly.
    const double shift = -res.mean / delta;
    if (res.max_dev < tol) {
      for (auto& vi : v)
        for (double& x : vi) x += shift;
      sol.residual = res.max_dev;
      break;
    }
    if (!std::isfinite(res.max_dev)) throw NonConvergence("cell iteration diverged", history);
    if (options.history_stride > 0 && iter % options.history_stride == 0) history.push_back(res.max_dev);
    if (iter >= options.max_iterations) {
      std::ostringstream os;
      os << "cell iteration cap reached (" << options.max_iterations << " sweeps, residual " << res.max_dev << ")";
      throw NonConvergence(os.str(), history);
    }
    if (it.adapt(res.max_gradient)) continue;
    if (options.sweep == CellSweep::gauss_seidel) {
      for (auto& vi : v)
        for (double& x : vi) x += shift;
      for (int s = 0; s < options.sweeps_per_check; ++s)
        if (!it.sweep(v, iter * options.sweeps_per_check + s)) break;
      continue;
    }
    const double dt = it.dt();
    for (int i = 0; i < m; ++i)
      for (std::size_t q = 0; q < grid.size(); ++q) v[i][q] += shift - dt * (r[i][q] - res.mean);
  }
  sol.iterations = iter;
  double total = 0.0, lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < m; ++i) {
    total += pairwise_sum(v[i]);
    for (double x : v[i]) {
      lo = std::min(lo, delta * x);
      hi = std::max(hi, delta * x);
    }
  }
  sol.h_bar_estimate = -delta * total / (static_cast<double>(m) * grid.size());
  sol.lower_spread = -hi;
  sol.upper_spread = -lo;
  sol.spread_constant = std::max(std::abs(hi + sol.h_bar_estimate), std::abs(lo + sol.h_bar_estimate)) / delta;
  sol.values = std::move(v);
  return sol;
}

EffectiveEstimate effective_at(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P,
                               const std::vector<double>& deltas, double tol, const CellOptions& options) {
  if (deltas.size() < 2) throw ConfigError("delta sequence needs at least two values");
  for (std::size_t s = 1; s < deltas.size(); ++s)
    if (!(deltas[s] < deltas[s - 1])) throw ConfigError("delta sequence must be decreasing");
  EffectiveEstimate est;
  est.deltas = deltas;
  const std::vector<GridFunction>* warm = nullptr;
  for (double d : deltas) {
    est.finest = solve_cell_discounted(spec, k, P, d, tol, options, warm);
    warm = &est.finest.values;
    est.estimates.push_back(est.finest.h_bar_estimate);
    est.spreads.push_back(est.finest.upper_spread - est.finest.lower_spread);
  }
  const std::size_t n = deltas.size();
  const double d1 = deltas[n - 2], d2 = deltas[n - 1];
  const double e1 = est.estimates[n - 2], e2 = est.estimates[n - 1];
  est.h_bar = (d1 * e2 - d2 * e1) / (d1 - d2);
  est.error_bar = std::max(std::abs(est.h_bar - e1), std::abs(est.h_bar - e2)) + tol;
  return est;
}

std::vector<GridFunction> correctors(const CellSolution& solution) {
  double total = 0.0;
  for (const auto& vi : solution.values) total += pairwise_sum(vi);
  const double mean = total / (static_cast<double>(solution.values.size()) * solution.grid.size());
  std::vector<GridFunction> out = solution.values;
  for (auto& vi : out)
    for (double& x : vi) x -= mean;
  return out;
}

double upper_certificate(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P, const TorusGrid& grid,
                         const std::vector<GridFunction>& test_pair, CertificateStencil stencil) {
  const int m = spec.m();
  if (static_cast<int>(test_pair.size()) != m || k.m() != m) throw ConfigError("test pair has the wrong component count");
  for (const auto& f : test_pair) {
    if (f.size() != grid.size()) throw ConfigError("test pair does not match the grid");
    for (double x : f)
      if (!std::isfinite(x)) throw ConfigError("test pair must be finite");
  }
  const double h = grid.spacing();
  double worst = -INFINITY;
  for (int i = 0; i < m; ++i) {
    const auto& phi = test_pair[i];
    for (std::size_t q = 0; q < grid.size(); ++q) {
      const Vec xi = grid.point(q);
      Vec pm{P[0], P[1]}, pp{P[0], P[1]};
      for (int axis = 0; axis < grid.dim(); ++axis) {
        const double left = phi[grid.neighbor(q, axis, -1)], right = phi[grid.neighbor(q, axis, 1)];
        if (stencil == CertificateStencil::central) {
          pm[axis] += 0.5 * (right - left) / h;
          pp[axis] = pm[axis];
        } else {
          pm[axis] += (phi[q] - left) / h;
          pp[axis] += (right - phi[q]) / h;
        }
      }
      double val = stencil == CertificateStencil::central ? spec.eval(i, xi, pm) : godunov_hamiltonian(spec, i, xi, pm, pp);
      val += phi[q];
      for (int j = 0; j < m; ++j) val -= k(i, j) * test_pair[j][q];
      worst = std::max(worst, val);
    }
  }
  return worst;
}

double potential_sum_bound(const HamiltonianSpec& spec) {
  if (spec.m() != 2 || !spec.separable(0) || !spec.separable(1)) return NAN;
  const TorusGrid g(spec.dim(), spec.dim() == 1 ? 4096 : 256);
  double lo = INFINITY;
  const auto& v1 = spec.component(0).potential;
  const auto& v2 = spec.component(1).potential;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const Vec xi = g.point(q);
    lo = std::min(lo, v1(xi) + v2(xi));
  }
  return -0.5 * lo;
}

double lower_bound(const HamiltonianSpec& spec, const Vec& P) {
  const TorusGrid g(spec.dim(), spec.dim() == 1 ? 4096 : 256);
  double lo = INFINITY;
  for (int i = 0; i < spec.m(); ++i)
    for (std::size_t q = 0; q < g.size(); ++q) lo = std::min(lo, spec.eval(i, g.point(q), P));
  const double sum = potential_sum_bound(spec);
  return std::isnan(sum) ? lo : std::max(lo, sum);
}

}  // namespace hjh
