#include "hjh/control_mc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hjh/errors.hpp"

namespace hjh {

namespace {

double wrap(double x) { return x - std::floor(x); }

Vec cell_point(const Vec& x, double epsilon, int dim) {
  return {wrap(x[0] / epsilon), dim == 2 ? wrap(x[1] / epsilon) : 0.0};
}

// Fills mean / std_error from per-path values; NaN marks a discarded path.
void summarize(McEstimate& e, const std::vector<double>& values, std::size_t first_path) {
  e.paths = values.size();
  e.samples.clear();
  e.kept.clear();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isnan(values[k])) {
      ++e.discarded;
      continue;
    }
    e.samples.push_back(values[k]);
    e.kept.push_back(first_path + k);
  }
  const double n = static_cast<double>(e.samples.size());
  if (e.samples.empty()) return;
  e.mean = pairwise_sum(e.samples) / n;
  std::vector<double> d(e.samples.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (e.samples[k] - e.mean) * (e.samples[k] - e.mean);
  e.std_error = e.samples.size() > 1 ? std::sqrt(pairwise_sum(d) / (n - 1.0) / n) : 0.0;
}

// Runs one controlled path over [0, horizon]; returns running cost plus terminal(state, eta), or NaN
// when the policy asks for a velocity with infinite cost.
template <class Terminal>
double run_path(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, const Vec& x, double horizon, int start,
                const VelocityPolicy& policy, double dt, std::uint64_t path, Terminal terminal) {
  const int dim = spec.dim();
  ChainCursor cur(chain, start, path);
  Vec eta = x;
  double s = 0.0, cost = 0.0;
  while (s < horizon) {
    while (cur.next_jump() <= s) cur.advance();
    const double end = std::min({s + dt, horizon, cur.next_jump()});
    const Vec v = policy(cur.state(), eta, s);
    const double L = spec.lagrangian(cur.state(), cell_point(eta, chain.epsilon, dim), {-v[0], -v[1]});
    if (!std::isfinite(L)) return NAN;
    const double len = end - s;
    cost += L * len;
    eta[0] += v[0] * len;
    if (dim == 2) eta[1] += v[1] * len;
    s = end;
  }
  while (cur.next_jump() <= horizon) cur.advance();
  return cost + terminal(cur.state(), eta);
}

McEstimate simulate(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, const Vec& x, double horizon,
                    int start, const VelocityPolicy& policy, const McOptions& opt, auto terminal) {
  chain.validate();
  if (spec.m() != chain.m()) throw ConfigError("Hamiltonian and chain disagree on the component count");
  if (start < 0 || start >= spec.m()) throw ConfigError("start state out of range");
  if (!(horizon >= 0.0)) throw ConfigError("horizon must be nonnegative");
  if (opt.paths < 2) throw ConfigError("need at least two paths");
  const double dt = opt.dt > 0.0 ? opt.dt : default_mc_dt(chain);
  if (dt > 0.1 / chain.max_rate() * (1.0 + 1e-12))
    throw ConfigError("dt too coarse for the switching rates: need dt <= 0.1 eps / max c_i");
  std::vector<double> values(opt.paths);
  const auto n = static_cast<long>(opt.paths);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k)
    values[k] = run_path(spec, chain, x, horizon, start, policy, dt, opt.first_path + k, terminal);
  McEstimate e;
  summarize(e, values, opt.first_path);
  return e;
}

}  // namespace

VelocityPolicy zero_policy() {
  return [](int, const Vec&, double) { return Vec{0.0, 0.0}; };
}

VelocityPolicy constant_policy(Vec velocity) {
  return [velocity](int, const Vec&, double) { return velocity; };
}

double default_mc_dt(const SwitchingChainSpec& chain) {
  const double h = 1.0 / 64.0, q_max = 4.0;
  return std::min(0.1 / chain.max_rate(), h / q_max);
}

PdeFeedback::PdeFeedback(HamiltonianSpec spec, double epsilon, std::vector<StateField> snapshots)
    : spec_(std::move(spec)), epsilon_(epsilon), snaps_(std::move(snapshots)) {
  if (snaps_.size() < 2) throw ConfigError("feedback needs at least two snapshots");
  if (snaps_.front().time != 0.0) throw ConfigError("feedback snapshots must start at t = 0");
  dtau_ = snaps_[1].time - snaps_[0].time;
  if (!(dtau_ > 0.0)) throw ConfigError("feedback snapshots must be increasing");
  for (std::size_t k = 0; k < snaps_.size(); ++k)
    if (std::abs(snaps_[k].time - k * dtau_) > 1e-9 * (1.0 + k * dtau_))
      throw ConfigError("feedback snapshots must sit on a uniform time lattice");
  if (snaps_.front().m() != spec_.m()) throw ConfigError("feedback snapshots have the wrong component count");
}

std::size_t PdeFeedback::slot(double tau) const {
  const double f = std::clamp(tau / dtau_, 0.0, static_cast<double>(snaps_.size() - 1));
  return std::min(static_cast<std::size_t>(f), snaps_.size() - 2);
}

double PdeFeedback::value(int i, const Vec& x, double tau) const {
  const std::size_t k = slot(tau);
  const double w = std::clamp((tau - snaps_[k].time) / dtau_, 0.0, 1.0);
  const auto& a = snaps_[k];
  const auto& b = snaps_[k + 1];
  const double ua = interpolate_periodic(a.grid, a.components[i], x);
  const double ub = interpolate_periodic(b.grid, b.components[i], x);
  return (1.0 - w) * ua + w * ub;
}

Vec PdeFeedback::gradient(int i, const Vec& x, double tau) const {
  const auto& g = snaps_.front().grid;
  const double h = g.spacing();
  Vec p{0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    Vec xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    p[a] = (value(i, xp, tau) - value(i, xm, tau)) / (2.0 * h);
  }
  return p;
}

VelocityPolicy PdeFeedback::policy(double t) const {
  return [this, t](int state, const Vec& x, double s) {
    const Vec p = gradient(state, x, std::max(t - s, 0.0));
    const Vec q = spec_.velocity(state, cell_point(x, epsilon_, spec_.dim()), p);
    return Vec{-q[0], -q[1]};
  };
}

McEstimate mc_value_cauchy(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, const Vec& x, double t,
                           int start, const std::vector<ScalarField>& f, const VelocityPolicy& policy,
                           const McOptions& options) {
  if (static_cast<int>(f.size()) != spec.m()) throw ConfigError("need one initial datum per component");
  return simulate(spec, chain, x, t, start, policy, options, [&f](int state, const Vec& eta) { return f[state](eta); });
}

SpeedRule max_speed(const HamiltonianSpec& spec, double epsilon, double fallback) {
  return [spec, epsilon, fallback](int state, const Vec& x) {
    const auto& c = spec.component(state);
    if (c.profile != Profile::norm) return fallback;
    return c.speed(cell_point(x, epsilon, spec.dim()));
  };
}

DirichletPolicy go_and_exit_policy(double target, SpeedRule speed, std::vector<int> exit_states) {
  DirichletPolicy p;
  p.name = "go_and_exit";
  p.velocity = [target, speed](int state, const Vec& x, double) {
    const double d = target - x[0];
    if (std::abs(d) < 1e-12) return Vec{0.0, 0.0};
    return Vec{std::copysign(speed(state, x), d), 0.0};
  };
  p.exit = [target, exit_states](int state, const Vec& x) {
    return std::abs(x[0] - target) < 1e-12 && std::find(exit_states.begin(), exit_states.end(), state) != exit_states.end();
  };
  return p;
}

DirichletPolicy never_exit_policy() {
  return {zero_policy(), [](int, const Vec&) { return false; }, "never_exit"};
}

McEstimate mc_value_dirichlet(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, double x, int start,
                              double lo, double hi, const std::vector<std::array<double, 2>>& g,
                              const DirichletPolicy& policy, const DirichletMcOptions& options) {
  chain.validate();
  if (spec.dim() != 1) throw ConfigError("Dirichlet Monte Carlo is one-dimensional");
  if (spec.m() != chain.m() || static_cast<int>(g.size()) != spec.m())
    throw ConfigError("Hamiltonian, chain and boundary data disagree on the component count");
  if (!(lo < hi) || x < lo || x > hi) throw ConfigError("start point must lie in [lo, hi]");
  if (options.paths < 2) throw ConfigError("need at least two paths");
  if (!(options.horizon_cap > 0.0)) throw ConfigError("horizon cap must be positive");
  const double dt = options.dt > 0.0 ? options.dt : default_mc_dt(chain);
  if (dt > 0.1 / chain.max_rate() * (1.0 + 1e-12))
    throw ConfigError("dt too coarse for the switching rates: need dt <= 0.1 eps / max c_i");
  const double cap = options.horizon_cap;
  std::vector<double> values(options.paths);
  const auto n = static_cast<long>(options.paths);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) {
    ChainCursor cur(chain, start, static_cast<std::uint64_t>(k));
    double eta = x, s = 0.0, cost = 0.0;
    double out = NAN;
    bool done = false;
    while (!done) {
      while (cur.next_jump() <= s) cur.advance();
      const bool at_lo = eta <= lo, at_hi = eta >= hi;
      if ((at_lo || at_hi) && policy.exit(cur.state(), {eta, 0.0})) {
        out = cost + std::exp(-s) * g[cur.state()][at_lo ? 0 : 1];
        break;
      }
      if (s >= cap) {
        out = cost;
        break;
      }
      double v = policy.velocity(cur.state(), {eta, 0.0}, s)[0];
      if ((at_lo && v < 0.0) || (at_hi && v > 0.0)) v = 0.0;
      double end = std::min({s + dt, cap, cur.next_jump()});
      // Stop at the boundary so the exit decision is taken there.
      if (v < 0.0) end = std::min(end, s + (lo - eta) / v);
      if (v > 0.0) end = std::min(end, s + (hi - eta) / v);
      const double L = spec.lagrangian(cur.state(), cell_point({eta, 0.0}, chain.epsilon, 1), {-v, 0.0});
      if (!std::isfinite(L)) break;
      cost += L * (std::exp(-s) - std::exp(-end));
      eta = std::clamp(eta + v * (end - s), lo, hi);
      s = end;
    }
    values[k] = out;
  }
  McEstimate e;
  summarize(e, values, 0);
  return e;
}

DppReport check_dpp(const HamiltonianSpec& spec, const SwitchingChainSpec& chain, const Vec& x, double t,
                    double h_split, int start, const std::vector<ScalarField>& f, const PdeFeedback& pde,
                    double scheme_slack, const McOptions& options) {
  if (!(h_split >= 0.0 && h_split <= t)) throw ConfigError("need 0 <= h_split <= t");
  DppReport r;
  r.t = t;
  r.h_split = h_split;
  const auto policy = pde.policy(t);
  r.one_shot = mc_value_cauchy(spec, chain, x, t, start, f, policy, options);
  r.nested = simulate(spec, chain, x, h_split, start, policy, options,
                      [&](int state, const Vec& eta) { return pde.value(state, eta, t - h_split); });
  r.pde_value = pde.value(start, x, t);
  // Pair over paths kept by both estimators.
  std::vector<double> d;
  std::size_t a = 0, b = 0;
  while (a < r.one_shot.kept.size() && b < r.nested.kept.size()) {
    if (r.one_shot.kept[a] == r.nested.kept[b]) {
      d.push_back(r.nested.samples[b] - r.one_shot.samples[a]);
      ++a, ++b;
    } else if (r.one_shot.kept[a] < r.nested.kept[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  McEstimate diff;
  summarize(diff, d, 0);
  r.difference = diff.mean;
  r.difference_se = diff.std_error;
  // Independent-sample standard error: the paired one shrinks with common paths and would make
  // the check sensitive to policy bias alone.
  const double se = std::hypot(r.one_shot.std_error, r.nested.std_error);
  r.tolerance = 3.0 * se + scheme_slack;
  r.pass = std::abs(r.nested.mean - r.one_shot.mean) <= r.tolerance;
  return r;
}

EffectiveMcEstimate mc_effective_estimate(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P,
                                          double horizon, std::size_t paths, std::uint64_t seed, int lattice) {
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (lattice < 3) throw ConfigError("velocity lattice needs at least 3 points");
  for (int i = 0; i < spec.m(); ++i)
    if (!spec.convex_in_p(i)) throw ConfigError("effective estimate needs convex components");
  const SwitchingChainSpec chain{k, 1.0, seed};
  const int dim = spec.dim();
  const double pn = norm(P, dim);
  const Vec dir = pn > 0.0 ? Vec{P[0] / pn, P[1] / pn} : Vec{1.0, 0.0};
  double a_max = 0.0;
  for (int i = 0; i < spec.m(); ++i) a_max = std::max(a_max, spec.speed_max(i));
  McOptions opt;
  opt.paths = paths;
  opt.dt = 0.05;
  auto evaluate = [&](const VelocityPolicy& pol) {
    // Running cost minus P . displacement, per unit time.
    const auto e = simulate(spec, chain, {0.0, 0.0}, horizon, 0, pol, opt, [&](int, const Vec& eta) {
      return -(P[0] * eta[0] + (dim == 2 ? P[1] * eta[1] : 0.0));
    });
    return e;
  };
  EffectiveMcEstimate best;
  double best_cost = INFINITY;
  const double R = std::max(4.0 * a_max * pn, 1.0);
  for (int j = 0; j < lattice; ++j) {
    // 1D: the full segment [-R, R]; 2D: the ray along P.
    const double lam = dim == 1 ? -R + 2.0 * R * j / (lattice - 1) : R * j / (lattice - 1);
    const Vec v = dim == 1 ? Vec{lam, 0.0} : Vec{lam * dir[0], lam * dir[1]};
    const auto e = evaluate(constant_policy(v));
    if (e.discarded > 0 || e.samples.empty()) continue;
    if (e.mean < best_cost) {
      best_cost = e.mean;
      best.std_error = e.std_error / horizon;
      best.best_policy = "constant";
    }
  }
  bool all_norm = true;
  for (int i = 0; i < spec.m(); ++i) all_norm = all_norm && spec.component(i).profile == Profile::norm;
  if (all_norm && pn > 0.0) {
    const auto speed = max_speed(spec, 1.0);
    const auto e = evaluate([&](int state, const Vec& x, double) {
      const double a = speed(state, x);
      return Vec{a * dir[0], a * dir[1]};
    });
    if (e.discarded == 0 && !e.samples.empty() && e.mean < best_cost) {
      best_cost = e.mean;
      best.std_error = e.std_error / horizon;
      best.best_policy = "max_speed";
    }
  }
  best.h_bar = -best_cost / horizon;
  return best;
}

void write_mc_csv(std::ostream& os, const std::vector<McRow>& rows, int dim) {
  os << (dim == 2 ? "x,y," : "x,") << "t_or_mode,estimate,std_error,paths,discard_rate\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.x[0] << ',';
    if (dim == 2) os << r.x[1] << ',';
    os << r.mode << ',' << r.estimate.mean << ',' << r.estimate.std_error << ',' << r.estimate.paths << ','
       << r.estimate.discard_rate() << '\n';
  }
}

}  // namespace hjh
