#include "hjh/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hjh/errors.hpp"

namespace hjh {

void EpsSystemProblem::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive");
  if (spec.m() != coupling.m()) throw ConfigError("Hamiltonian and coupling disagree on the component count");
  if (spec.dim() != grid.dim()) throw ConfigError("Hamiltonian and grid disagree on the dimension");
  if (static_cast<int>(initial.size()) != spec.m()) throw ConfigError("one initial datum per component is required");
  for (const auto& f : initial) {
    if (f.size() != grid.size()) throw ConfigError("initial datum does not match the grid");
    for (double v : f)
      if (!std::isfinite(v)) throw ConfigError("initial datum is not finite");
  }
}

GridFunction EpsSystemProblem::averaged_initial() const {
  const auto& pi = coupling.stationary();
  GridFunction out(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double s = 0.0;
    for (int i = 0; i < spec.m(); ++i) s += pi(i) * initial[i][k];
    out[k] = s;
  }
  return out;
}

CoupledEvolution::CoupledEvolution(EpsSystemProblem problem, EvolutionOptions options)
    : problem_(std::move(problem)), options_(options) {
  problem_.validate();
  coeffs_ = sample_components(problem_.spec, problem_.grid, 1.0 / problem_.epsilon);
  theta_ = options_.theta > 0.0 ? options_.theta : problem_.spec.flux_bound(options_.r_grad);
  if (!(theta_ > 0.0)) theta_ = 1.0;  // H independent of p: any positive bound is valid
  max_dt_ = problem_.grid.spacing() / (2.0 * problem_.grid.dim() * theta_);
}

StateField CoupledEvolution::initial_state() const { return StateField(problem_.grid, problem_.initial, 0.0); }

void CoupledEvolution::hamiltonian_substep(const StateField& in, StateField& out, double dt) const {
  const TorusGrid& g = problem_.grid;
  const int dim = g.dim();
  const int n = g.points_per_axis();
  const double inv_h = 1.0 / g.spacing();
  const auto size = static_cast<long>(g.size());
  double seen = 0.0;
  for (int i = 0; i < in.m(); ++i) {
    const double* u = in.components[i].data();
    double* w = out.components[i].data();
    const auto& c = coeffs_[i];
#pragma omp parallel for schedule(static) reduction(max : seen)
    for (long k = 0; k < size; ++k) {
      const int ix = dim == 1 ? static_cast<int>(k) : static_cast<int>(k % n);
      const int iy = dim == 1 ? 0 : static_cast<int>(k / n);
      Vec pm{0.0, 0.0}, pp{0.0, 0.0};
      const long row = static_cast<long>(iy) * n;
      const long xl = row + (ix == 0 ? n - 1 : ix - 1);
      const long xr = row + (ix == n - 1 ? 0 : ix + 1);
      pm[0] = (u[k] - u[xl]) * inv_h;
      pp[0] = (u[xr] - u[k]) * inv_h;
      if (dim == 2) {
        const long yd = static_cast<long>(iy == 0 ? n - 1 : iy - 1) * n + ix;
        const long yu = static_cast<long>(iy == n - 1 ? 0 : iy + 1) * n + ix;
        pm[1] = (u[k] - u[yd]) * inv_h;
        pp[1] = (u[yu] - u[k]) * inv_h;
      }
      seen = std::max({seen, std::abs(pm[0]), std::abs(pp[0]), std::abs(pm[1]), std::abs(pp[1])});
      w[k] = u[k] - dt * flux_kernel(c.profile, dim, c.speed[k], c.potential[k], pm, pp, options_.flux, theta_);
    }
  }
  observed_gradient_ = std::max(observed_gradient_, seen);
}

void CoupledEvolution::coupling_substep(StateField& s, const Eigen::MatrixXd& prop) const {
  const int m = s.m();
  if (m == 1) return;
  const auto size = static_cast<long>(problem_.grid.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < size; ++k) {
    double in[8], out[8];
    for (int j = 0; j < m; ++j) in[j] = s.components[j][k];
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += prop(i, j) * in[j];
      out[i] = acc;
    }
    for (int i = 0; i < m; ++i) s.components[i][k] = out[i];
  }
}

StateField CoupledEvolution::step(const StateField& state, double dt) const {
  if (!(dt >= 0.0)) throw ConfigError("time step must be nonnegative");
  if (dt > max_dt_ * (1.0 + 1e-12)) throw CflViolation(dt, max_dt_);
  if (!(state.grid == problem_.grid) || state.m() != problem_.spec.m()) throw ConfigError("state does not match the problem");
  StateField next = state;
  hamiltonian_substep(state, next, dt);
  coupling_substep(next, problem_.coupling.propagator(dt / problem_.epsilon));
  next.time = state.time + dt;
  return next;
}

std::vector<StateField> CoupledEvolution::evolve(const std::vector<double>& sample_times) const {
  for (std::size_t s = 0; s < sample_times.size(); ++s) {
    const double t = sample_times[s];
    if (!(t >= 0.0) || t > problem_.horizon * (1.0 + 1e-12)) throw ConfigError("sample time outside [0, T]");
    if (s > 0 && !(t > sample_times[s - 1])) throw ConfigError("sample times must be increasing");
  }
  // March on the fixed lattice t_n = n dt; samples between lattice points come from a
  // truncated step into a temporary, so the trajectory never depends on the sample list.
  const double dt = max_dt_;
  const Eigen::MatrixXd prop = problem_.coupling.propagator(dt / problem_.epsilon);
  StateField cur = initial_state();
  StateField scratch = cur;
  long n = 0;
  std::vector<StateField> out;
  out.reserve(sample_times.size());
  for (double t : sample_times) {
    while (static_cast<double>(n + 1) * dt <= t * (1.0 + 1e-14)) {
      hamiltonian_substep(cur, scratch, dt);
      coupling_substep(scratch, prop);
      std::swap(cur, scratch);
      ++n;
      cur.time = static_cast<double>(n) * dt;
    }
    const double rest = t - static_cast<double>(n) * dt;
    if (rest > 1e-15 * std::max(1.0, t)) {
      StateField snap = step(cur, std::min(rest, dt));
      snap.time = t;
      out.push_back(std::move(snap));
    } else {
      StateField snap = cur;
      snap.time = t;
      out.push_back(std::move(snap));
    }
  }
  return out;
}

StateField step(const EpsSystemProblem& problem, const StateField& state, double dt, const EvolutionOptions& options) {
  return CoupledEvolution(problem, options).step(state, dt);
}

std::vector<StateField> evolve(const EpsSystemProblem& problem, const std::vector<double>& sample_times,
                               const EvolutionOptions& options) {
  return CoupledEvolution(problem, options).evolve(sample_times);
}

void write_snapshots_csv(std::ostream& os, const std::vector<StateField>& snapshots) {
  if (snapshots.empty()) return;
  const bool two = snapshots.front().grid.dim() == 2;
  os << (two ? "t,x,y,component,value\n" : "t,x,component,value\n");
  const auto old = os.precision(17);
  for (const auto& s : snapshots) {
    for (int i = 0; i < s.m(); ++i) {
      for (std::size_t k = 0; k < s.grid.size(); ++k) {
        const Vec x = s.grid.point(k);
        os << s.time << ',' << x[0] << ',';
        if (two) os << x[1] << ',';
        os << i << ',' << s.components[i][k] << '\n';
      }
    }
  }
  os.precision(old);
}

}  // namespace hjh
