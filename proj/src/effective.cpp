#include "hjh/effective.hpp"

#include <algorithm>
#include <cmath>

#include "hjh/errors.hpp"

namespace hjh {

namespace {

class EffectiveMarch {
 public:
  EffectiveMarch(const EffectiveProblem& p, const EffectiveOptions& o) : p_(p), o_(o) {
    if (!p.table.complete()) throw ConfigError("effective table has gaps");
    if (p.table.lattice().dim != p.grid.dim()) throw ConfigError("table and grid dimensions differ");
    if (p.initial.size() != p.grid.size()) throw ConfigError("initial datum does not match the grid");
    theta_ = 0.0;
    for (int a = 0; a < p.grid.dim(); ++a) theta_ = std::max(theta_, p.table.max_slope(a));
    if (!(theta_ > 0.0)) theta_ = 1.0;
    dt_ = p.grid.spacing() / (2.0 * p.grid.dim() * theta_);
  }

  double theta() const { return theta_; }
  double dt() const { return dt_; }
  std::size_t clamped() const { return clamped_; }

  void advance(const GridFunction& u, GridFunction& w, double dt) {
    const TorusGrid& g = p_.grid;
    const double inv_h = 1.0 / g.spacing();
    const auto size = static_cast<long>(g.size());
    std::size_t clamped = 0;
#pragma omp parallel for schedule(static) reduction(+ : clamped)
    for (long k = 0; k < size; ++k) {
      Vec pm{0.0, 0.0}, pp{0.0, 0.0};
      for (int a = 0; a < g.dim(); ++a) {
        pm[a] = (u[k] - u[g.neighbor(k, a, -1)]) * inv_h;
        pp[a] = (u[g.neighbor(k, a, 1)] - u[k]) * inv_h;
      }
      bool c = false;
      double flux;
      if (o_.flux == FluxKind::godunov) {
        flux = p_.table.godunov(pm, pp, &c);
      } else {
        const Vec mid{0.5 * (pm[0] + pp[0]), 0.5 * (pm[1] + pp[1])};
        double diff = 0.0;
        for (int a = 0; a < g.dim(); ++a) diff += pp[a] - pm[a];
        flux = p_.table.interpolate(mid, &c) - 0.5 * theta_ * diff;
      }
      if (c) ++clamped;
      w[k] = u[k] - dt * flux;
    }
    clamped_ += clamped;
  }

 private:
  const EffectiveProblem& p_;
  EffectiveOptions o_;
  double theta_ = 1.0;
  double dt_ = 0.0;
  std::size_t clamped_ = 0;
};

}  // namespace

EffectiveRun solve_effective(const EffectiveProblem& problem, const std::vector<double>& sample_times,
                             const EffectiveOptions& options) {
  EffectiveMarch march(problem, options);
  for (std::size_t s = 0; s < sample_times.size(); ++s) {
    if (!(sample_times[s] >= 0.0) || sample_times[s] > problem.horizon * (1.0 + 1e-12))
      throw ConfigError("sample time outside [0, T]");
    if (s > 0 && !(sample_times[s] > sample_times[s - 1])) throw ConfigError("sample times must be increasing");
  }
  EffectiveRun run;
  run.theta = march.theta();
  run.dt = march.dt();
  const double dt = march.dt();
  GridFunction cur = problem.initial, next(cur.size());
  long n = 0;
  for (double t : sample_times) {
    while (static_cast<double>(n + 1) * dt <= t * (1.0 + 1e-14)) {
      march.advance(cur, next, dt);
      std::swap(cur, next);
      ++n;
    }
    const double rest = t - static_cast<double>(n) * dt;
    if (rest > 1e-15 * std::max(1.0, t)) {
      GridFunction tmp(cur.size());
      march.advance(cur, tmp, std::min(rest, dt));
      run.snapshots.emplace_back(problem.grid, std::vector<GridFunction>{std::move(tmp)}, t);
    } else {
      run.snapshots.emplace_back(problem.grid, std::vector<GridFunction>{cur}, t);
    }
  }
  run.clamped_queries = march.clamped();
  if (run.clamped_queries > 0)
    run.warnings.push_back(std::to_string(run.clamped_queries) + " table queries fell outside the P-lattice and were clamped");
  return run;
}

std::array<GridFunction, 2> inner_solution(const GridFunction& f1, const GridFunction& f2, double t_fast) {
  if (f1.size() != f2.size()) throw ConfigError("inner solution data sizes differ");
  const double e = std::exp(-2.0 * t_fast);
  std::array<GridFunction, 2> w{GridFunction(f1.size()), GridFunction(f1.size())};
  for (std::size_t k = 0; k < f1.size(); ++k) {
    const double mean = 0.5 * (f1[k] + f2[k]);
    const double half = 0.5 * (f1[k] - f2[k]);
    w[0][k] = t_fast == 0.0 ? f1[k] : mean + half * e;
    w[1][k] = t_fast == 0.0 ? f2[k] : mean - half * e;
  }
  return w;
}

MatchedTrajectory matched_solutions(const std::vector<StateField>& u_run, const std::vector<GridFunction>& f,
                                    const CouplingMatrix& k, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const int m = k.m();
  if (static_cast<int>(f.size()) != m) throw ConfigError("one datum per component is required");
  MatchedTrajectory out;
  out.epsilon = epsilon;
  out.effective = u_run;
  const auto& pi = k.stationary();
  for (const auto& snap : u_run) {
    const auto& u = snap.components.at(0);
    for (const auto& fi : f)
      if (fi.size() != u.size()) throw ConfigError("data and effective run are on different grids");
    std::vector<GridFunction> comps(m, GridFunction(u.size()));
    const double t = snap.time;
    const bool symmetric_pair = m == 2 && k(0, 1) == 1.0 && k(1, 0) == 1.0;
    const Eigen::MatrixXd prop = k.propagator(t / epsilon);
    const double e = std::exp(-2.0 * t / epsilon);
    for (std::size_t q = 0; q < u.size(); ++q) {
      double fbar = 0.0;
      for (int j = 0; j < m; ++j) fbar += pi(j) * f[j][q];
      for (int i = 0; i < m; ++i) {
        double osc;
        if (symmetric_pair) {
          osc = 0.5 * (f[i][q] - f[1 - i][q]) * e;
        } else {
          osc = 0.0;
          for (int j = 0; j < m; ++j) osc += prop(i, j) * (f[j][q] - fbar);
        }
        comps[i][q] = u[q] + osc;
      }
    }
    out.matched.emplace_back(snap.grid, std::move(comps), t);
  }
  return out;
}

std::array<double, 2> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return {NAN, NAN};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace hjh
