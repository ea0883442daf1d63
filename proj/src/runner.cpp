#include "hjh/runner.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <openssl/opensslv.h>

#include "hjh/cell.hpp"
#include "hjh/chain.hpp"
#include "hjh/control_mc.hpp"
#include "hjh/dirichlet.hpp"
#include "hjh/effective.hpp"
#include "hjh/elementary.hpp"
#include "hjh/errors.hpp"
#include "hjh/evolution.hpp"
#include "hjh/flat.hpp"
#include "hjh/parallel.hpp"

namespace hjh {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
  const ExperimentConfig& config;
  ArtifactSet& art;
  std::vector<Verdict>& verdicts;

  void check(std::string name, bool pass, double value, double threshold, std::string detail = {}) {
    verdicts.push_back({std::move(name), pass, value, threshold, std::move(detail)});
  }
};

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// Short form for verdict names and file names.
std::string tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string label(const Vec& P, int dim) { return dim == 1 ? tag(P[0]) : "(" + tag(P[0]) + "," + tag(P[1]) + ")"; }

int eps_grid(double eps, int cells, double length = 1.0) {
  return static_cast<int>(std::lround(cells * length / eps));
}

CellOptions cell_options(int N, FluxKind flux = FluxKind::godunov) {
  CellOptions o;
  o.points_per_axis = N;
  o.flux = flux;
  return o;
}

EffectiveTable make_table(const HamiltonianSpec& spec, const CouplingMatrix& k, const TableSpec& t) {
  return build_table(spec, k, t.lattice, t.deltas, t.tol, cell_options(t.N));
}

std::string table_csv(const EffectiveTable& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

// v_1 - v_2 of the explicit pair at P = +-1.
double corrector_formula(double xi, double sign) {
  const double s = std::sin(2.0 * M_PI * xi), c = std::cos(2.0 * M_PI * xi);
  return sign * (-c / (8.0 * M_PI * M_PI) - s / (4.0 * M_PI));
}

void corrector_check(Context& ctx, const HamiltonianSpec& spec, const CouplingMatrix& k, const CorrectorCheck& chk,
                     int N, const std::vector<double>& deltas, double tol, const EffectiveEstimate* have) {
  if (spec.m() != 2) throw ConfigError("corrector check needs two components");
  const EffectiveEstimate est = have ? *have : effective_at(spec, k, chk.P, deltas, tol, cell_options(N));
  const auto v = correctors(est.finest);
  const auto& g = est.finest.grid;
  const double sign = chk.P[0] > 0.0 ? 1.0 : -1.0;
  std::ostringstream os;
  os << "xi,v1,v2,difference,closed_form\n" << std::setprecision(17);
  double err = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double xi = g.point(q)[0];
    const double d = v[0][q] - v[1][q], exact = corrector_formula(xi, sign);
    err = std::max(err, std::abs(d - exact));
    os << xi << ',' << v[0][q] << ',' << v[1][q] << ',' << d << ',' << exact << '\n';
  }
  ctx.art.add("correctors.csv", os.str());
  ctx.check("corrector_difference P=" + tag(chk.P[0]), err <= chk.tol, err, chk.tol, "sup |(v1 - v2) - closed form|");
}

void run_cell(Context& ctx, const CellParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const int dim = spec.dim();
  std::vector<Vec> points = p.P;
  auto add_point = [&](const Vec& P) {
    for (const auto& q : points)
      if (q == P) return;
    points.push_back(P);
  };
  for (const auto& e : p.expect) add_point(e.P);
  if (p.corrector) add_point(p.corrector->P);
  if (p.lower_bound && p.strict_gap) add_point(p.lower_bound->P);
  std::vector<EffectiveEstimate> est;
  std::ostringstream os;
  os << (dim == 1 ? "P" : "P1,P2") << ",h_bar,err_bar,lower_cert,upper_cert,iterations,residual\n" << std::setprecision(17);
  auto flush = [&] { ctx.art.add("cell.csv", os.str()); };
  for (const auto& P : points) {
    try {
      auto opts = cell_options(p.N, p.flux);
      opts.max_iterations = p.max_iterations;
      est.push_back(effective_at(spec, k, P, p.deltas, p.tol, opts));
    } catch (const NonConvergence&) {
      flush();
      throw;
    }
    const auto& e = est.back();
    os << P[0] << ',';
    if (dim == 2) os << P[1] << ',';
    os << e.h_bar << ',' << e.error_bar << ',' << lower_bound(spec, P) << ',' << -e.finest.lower_spread << ','
       << e.finest.iterations << ',' << e.finest.residual << '\n';
  }
  flush();
  auto at = [&](const Vec& P) -> const EffectiveEstimate& {
    for (std::size_t s = 0; s < points.size(); ++s)
      if (points[s] == P) return est[s];
    throw ConfigError("internal: missing estimate");
  };
  for (const auto& e : p.expect) {
    const double dev = std::abs(at(e.P).h_bar - e.value);
    ctx.check("h_bar P=" + label(e.P, dim), dev <= e.tol, at(e.P).h_bar, e.value, "tolerance " + tag(e.tol));
  }
  if (p.lower_bound) {
    const double lb = lower_bound(spec, p.lower_bound->P);
    ctx.check("lower_bound P=" + label(p.lower_bound->P, dim), std::abs(lb - p.lower_bound->value) <= p.lower_bound->tol,
              lb, p.lower_bound->value, "tolerance " + tag(p.lower_bound->tol));
    if (p.strict_gap) {
      const auto& e = at(p.lower_bound->P);
      const double gap = e.h_bar - e.error_bar - lb;
      ctx.check("strict_gap P=" + label(p.lower_bound->P, dim), gap > 0.0, gap, 0.0, "h_bar - err_bar - lower_bound");
    }
  }
  if (p.corrector) corrector_check(ctx, spec, k, *p.corrector, p.N, p.deltas, p.tol, &at(p.corrector->P));
}

void elementary_verdicts(Context& ctx, const ElementaryReport& rep) {
  ctx.art.add_json("elementary.json", to_json(rep));
  for (const auto& c : rep.checks)
    if (c.applicable) ctx.check(c.name, c.pass, c.worst, 0.0, std::to_string(c.count) + " comparisons");
}

void run_table(Context& ctx, const TableParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const auto table = make_table(spec, k, p.table);
  ctx.art.add("table.csv", table_csv(table));
  ctx.check("table_complete", table.complete(), static_cast<double>(table.gaps()), 0.0, "lattice points without a value");
  for (const auto& e : p.expect) {
    const double h = table.interpolate(e.P);
    ctx.check("h_bar P=" + label(e.P, spec.dim()), std::abs(h - e.value) <= e.tol, h, e.value, "tolerance " + tag(e.tol));
  }
  auto meta = metadata_for(spec);
  std::optional<EffectiveTable> single, kmax;
  if (p.collapse) {
    for (int i = 1; i < spec.m(); ++i)
      if (spec.component(i).describe() != spec.component(0).describe())
        throw ConfigError("collapse check needs equal components");
    single = make_table(HamiltonianSpec(spec.dim(), {spec.component(0)}), CouplingMatrix::single(), p.table);
    ctx.art.add("table_single.csv", table_csv(*single));
    meta.single = &*single;
  }
  if (p.max_comparison) {
    kmax = make_table(max_hamiltonian(spec), CouplingMatrix::single(), p.table);
    ctx.art.add("table_max.csv", table_csv(*kmax));
    meta.max_table = &*kmax;
  }
  elementary_verdicts(ctx, run_elementary_checks(table, meta));
  if (p.corrector) corrector_check(ctx, spec, k, *p.corrector, p.table.N, p.table.deltas, p.table.tol, nullptr);
}

// Quadratic-in-t Lagrange extrapolation to t = 0 (linear for two nodes).
double extrapolate_to_zero(const std::vector<double>& t, const std::vector<double>& y) {
  double out = 0.0;
  for (std::size_t a = 0; a < t.size(); ++a) {
    double w = 1.0;
    for (std::size_t b = 0; b < t.size(); ++b)
      if (b != a) w *= t[b] / (t[b] - t[a]);
    out += w * y[a];
  }
  return out;
}

std::size_t time_index(const std::vector<double>& times, double t) {
  for (std::size_t s = 0; s < times.size(); ++s)
    if (std::abs(times[s] - t) < 1e-12) return s;
  throw ConfigError("time " + tag(t) + " is not among the sample times");
}

// exp(s (K - I)/eps) applied by the solver's coupling substep to constant eigenvector data.
void spectral_decay_check(Context& ctx, const CouplingMatrix& k, double eps) {
  const int m = k.m();
  Eigen::EigenSolver<Eigen::MatrixXd> es(k.generator());
  std::vector<Component> zero(m);
  for (auto& c : zero) {
    c.profile = Profile::norm;
    c.speed = Coefficient::constant(0.0);
  }
  const HamiltonianSpec spec(1, zero);
  const TorusGrid grid(1, 8);
  const double dt = 0.5 * eps;
  double worst = 0.0;
  int used = 0;
  for (int e = 0; e < m; ++e) {
    const auto lam = es.eigenvalues()[e];
    if (std::abs(lam.imag()) > 1e-12 || std::abs(lam.real()) < 1e-12) continue;
    Eigen::VectorXd v = es.eigenvectors().col(e).real();
    if (std::abs(v.sum()) > 1e-10 * v.norm()) continue;  // only data with h . j = 0
    std::vector<GridFunction> data;
    for (int i = 0; i < m; ++i) data.emplace_back(grid.size(), v[i]);
    EpsSystemProblem prob{spec, k, eps, grid, data, dt};
    const CoupledEvolution solver(prob);
    const auto out = solver.step(solver.initial_state(), dt);
    const double factor = std::exp(lam.real() * dt / eps);
    for (int i = 0; i < m; ++i)
      for (std::size_t q = 0; q < grid.size(); ++q) worst = std::max(worst, std::abs(out.components[i][q] - factor * v[i]));
    ++used;
  }
  ctx.check("coupling_spectral_decay", used > 0 && worst <= 1e-10, worst, 1e-10,
            std::to_string(used) + " eigenvectors with h . j = 0");
}

void run_evolve(Context& ctx, const EvolveParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const auto f = data_of(p.initial);
  std::vector<double> gaps;
  json summary = json::array();
  std::vector<StateField> last_run;
  std::optional<EpsSystemProblem> last_prob;
  for (double eps : p.epsilons) {
    const TorusGrid grid(spec.dim(), eps_grid(eps, p.eps_cells));
    std::vector<GridFunction> data;
    for (const auto& fi : f) data.push_back(sample(grid, fi));
    EpsSystemProblem prob{spec, k, eps, grid, data, p.horizon};
    const CoupledEvolution solver(prob);
    const auto run = solver.evolve(p.times);
    std::ostringstream os;
    write_snapshots_csv(os, run);
    ctx.art.add("snapshots_eps" + tag(eps) + ".csv", os.str());
    json row{{"epsilon", eps}, {"N", grid.points_per_axis()}, {"theta", solver.theta()},
             {"observed_gradient", solver.observed_gradient()}, {"doubly_stochastic", k.doubly_stochastic()}};
    if (p.barriers) {
      const auto bar = build_barriers(prob, p.times);
      const auto rep = check_sandwich(run, bar, p.slack_h * grid.spacing());
      row["sandwich_violations"] = rep.violations;
      ctx.check("barrier_sandwich eps=" + tag(eps), rep.ok(), static_cast<double>(rep.violations), 0.0,
                "slack " + tag(rep.slack));
    }
    if (p.common_limit) {
      const auto s = time_index(p.times, p.common_limit->probe_time);
      double gap = 0.0;
      for (std::size_t q = 0; q < grid.size(); ++q)
        for (int i = 0; i < spec.m(); ++i)
          for (int j = i + 1; j < spec.m(); ++j)
            gap = std::max(gap, std::abs(run[s].components[i][q] - run[s].components[j][q]));
      gaps.push_back(gap);
      row["pairwise_gap"] = gap;
    }
    summary.push_back(row);
    last_run = run;
    last_prob = prob;
  }
  if (p.common_limit) {
    const auto& cl = *p.common_limit;
    bool dec = true;
    for (std::size_t s = 1; s < gaps.size(); ++s) dec = dec && gaps[s] < gaps[s - 1];
    ctx.check("pairwise_gaps_decrease", dec, gaps.back(), gaps.front(), "max_x max_ij |u_i - u_j| at t = " + tag(cl.probe_time));
    // Common limit estimated by the pi-weighted mean at the smallest eps, extrapolated to t = 0.
    const auto& pi = k.stationary();
    const auto fbar = last_prob->averaged_initial();
    std::vector<std::size_t> idx;
    for (double t : cl.fit_times) idx.push_back(time_index(p.times, t));
    double err = 0.0;
    for (std::size_t q = 0; q < fbar.size(); ++q) {
      std::vector<double> y;
      for (auto s : idx) {
        double mean = 0.0;
        for (int i = 0; i < spec.m(); ++i) mean += pi[i] * last_run[s].components[i][q];
        y.push_back(mean);
      }
      err = std::max(err, std::abs(extrapolate_to_zero(cl.fit_times, y) - fbar[q]));
    }
    ctx.check("limit_datum_extrapolation", err <= cl.tol, err, cl.tol, "sup |extrapolated limit - pi . f|");
    spectral_decay_check(ctx, k, p.epsilons.back());
  }
  ctx.art.add_json("evolve.json", summary);
}

void run_rate(Context& ctx, const RateParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const auto f = data_of(p.initial);
  const auto table = make_table(spec, k, p.table);
  ctx.art.add("table.csv", table_csv(table));
  RateOptions ro;
  ro.eps_cells = p.eps_cells;
  ro.probe_time = p.probe_time;
  ro.effective.flux = p.effective_flux;
  const auto rep = rate_harness(spec, k, f, p.epsilons, p.horizon, table, ro);
  std::ostringstream os;
  write_rate_csv(os, rep);
  ctx.art.add("rate.csv", os.str());
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"epsilon", r.epsilon}, {"N", r.grid_n}, {"E_total", r.e_total}, {"E_layer", r.e_layer},
                    {"E_bulk", r.e_bulk}, {"layer_constant", r.layer_constant}, {"probe_error", r.probe_error},
                    {"probe_gap", r.probe_gap}, {"sandwich_violations", r.sandwich.violations}, {"ok", r.ok},
                    {"failure", r.failure}});
  ctx.art.add_json("rate.json", {{"rows", rows},
                                 {"fitted_slope", rep.fitted_slope},
                                 {"layer_constant_mean", rep.layer_constant_mean},
                                 {"layer_constant_spread", rep.layer_constant_spread},
                                 {"ratios", rep.ratios},
                                 {"doubly_stochastic", rep.doubly_stochastic}});
  for (const auto& r : rep.rows)
    if (!r.ok) throw NonConvergence("rate row eps=" + tag(r.epsilon) + " failed: " + r.failure, {});
  auto decreasing = [&](auto field) {
    bool ok = true;
    for (std::size_t s = 1; s < rep.rows.size(); ++s) ok = ok && field(rep.rows[s]) < field(rep.rows[s - 1]);
    return ok;
  };
  const auto& e = p.expect;
  ctx.check("layer_constant_spread", rep.layer_constant_spread <= e.layer_spread, rep.layer_constant_spread,
            e.layer_spread, "max |C/mean - 1| with C = E_layer / (eps |log eps|)");
  if (p.layer_only) {
    ctx.check("layer_error_decreasing", decreasing([](const RateRow& r) { return r.e_layer; }), rep.rows.back().e_layer,
              rep.rows.front().e_layer);
    return;
  }
  if (e.monotone)
    ctx.check("error_decreasing", decreasing([](const RateRow& r) { return r.e_total; }), rep.rows.back().e_total,
              rep.rows.front().e_total);
  ctx.check("fitted_slope", rep.fitted_slope >= e.min_slope, rep.fitted_slope, e.min_slope);
  for (const auto& r : rep.rows)
    if (std::abs(r.epsilon - e.sandwich_eps) < 1e-12)
      ctx.check("barrier_sandwich eps=" + tag(r.epsilon), r.sandwich.ok(), static_cast<double>(r.sandwich.violations),
                0.0, "slack 5h");
  ctx.check("probe_error_decreasing", decreasing([](const RateRow& r) { return r.probe_error; }),
            rep.rows.back().probe_error, rep.rows.front().probe_error, "max_i,x |u_i - u| at t = " + tag(p.probe_time));
  ctx.check("probe_component_gap", rep.rows.back().probe_gap <= e.probe_gap, rep.rows.back().probe_gap, e.probe_gap,
            "max_x |u_1 - u_2| at the smallest eps");
}

void run_flat(Context& ctx, const FlatParams& p) {
  const auto exp = flat_experiment(p.experiment, p.eps0);
  auto cfg = default_flat_config(exp);
  if (p.N) cfg.cell.points_per_axis = p.N;
  if (p.tol > 0.0) cfg.tol = p.tol;
  const auto v = run_flat_experiment(exp, cfg);
  ctx.art.add_json("flat.json", to_json(v));
  std::ostringstream os;
  os << "P1,P2,h_bar,err_bar,lower_cert,upper_cert,predicted,pass\n" << std::setprecision(17);
  for (const auto& pt : v.points)
    os << pt.P[0] << ',' << pt.P[1] << ',' << pt.h_bar << ',' << pt.err_bar << ',' << pt.lower_cert << ','
       << pt.upper_cert << ',' << pt.predicted << ',' << pt.pass << '\n';
  ctx.art.add("flat.csv", os.str());
  for (const auto& pt : v.points)
    ctx.check("prediction P=" + label(pt.P, 2), pt.pass, pt.h_bar, pt.predicted, to_string(v.prediction));
  if (v.prediction != Prediction::stripe_square)
    ctx.check("gamma_scan", v.gamma_scan > 0.0, v.gamma_scan, 0.0, "largest sampled radius with all points flat");
  if (v.has_subsolution)
    ctx.check("subsolution_certificate", v.subsolution.ok, v.subsolution.gamma, 0.0, "explicit pair certifies <= 0");
}

void run_dirichlet(Context& ctx, const DirichletParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const auto table = make_table(spec, k, p.table);
  ctx.art.add("table.csv", table_csv(table));
  std::vector<double> gaps;
  json rows = json::array();
  for (double eps : p.epsilons) {
    const int n = eps_grid(eps, p.eps_cells, p.hi - p.lo);
    const auto grid = BoxGrid::interval(p.lo, p.hi, n);
    std::vector<GridFunction> g;
    for (const auto& b : p.boundary) g.push_back(side_data(grid, {b[0], b[1]}));
    const DirichletProblem prob{spec, k, eps, grid, g};
    const auto sol = solve_dirichlet_eps(prob, p.tol);
    const auto eff = solve_dirichlet_effective(table, grid, effective_boundary_datum(g), p.tol);
    std::ostringstream os, oe;
    write_dirichlet_csv(os, sol);
    write_dirichlet_csv(oe, eff);
    ctx.art.add("dirichlet_eps" + tag(eps) + ".csv", os.str());
    ctx.art.add("dirichlet_effective_eps" + tag(eps) + ".csv", oe.str());
    const std::size_t adj = p.side == "left" ? 1 : grid.size() - 2;
    double gap = 0.0, sup = 0.0;
    for (int i = 0; i < sol.m(); ++i) {
      gap = std::max(gap, std::abs(sol.components[i][adj] - eff.components[0][adj]));
      for (std::size_t q = 0; q < grid.size(); ++q)
        if (!grid.is_boundary(q)) sup = std::max(sup, std::abs(sol.components[i][q] - eff.components[0][q]));
    }
    gaps.push_back(gap);
    rows.push_back({{"epsilon", eps}, {"intervals", n}, {"adjacent_gap", gap}, {"interior_sup_error", sup},
                    {"iterations", sol.iterations}, {"effective_at_adjacent", eff.components[0][adj]}});
  }
  ctx.art.add_json("dirichlet.json", rows);
  bool dec = true;
  for (std::size_t s = 1; s < gaps.size(); ++s) dec = dec && (gaps[s] < gaps[s - 1] || gaps[s] <= 1e-12);
  ctx.check("adjacent_gap_decreasing", dec, gaps.back(), gaps.front(), "a gap already at roundoff counts as converged");
  ctx.check("adjacent_gap eps=" + tag(p.epsilons.back()), gaps.back() <= p.gap_tol, gaps.back(), p.gap_tol,
            "max_i |u_i^eps - u| next to the " + p.side + " endpoint, u with datum min_i g_i");
}

bool pure_coupling(const HamiltonianSpec& spec) {
  for (const auto& c : spec.components())
    if (!c.speed.is_constant || c.speed.constant_value != 0.0 || !c.potential.is_constant ||
        c.potential.constant_value != 0.0)
      return false;
  return true;
}

void run_mc(Context& ctx, const McParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const auto f = data_of(p.initial);
  const SwitchingChainSpec chain{k, p.epsilon, ctx.config.seed};
  chain.validate();
  if (p.closed_form && !pure_coupling(spec)) throw ConfigError("closed_form needs the zero Hamiltonian");
  McOptions opt;
  opt.paths = p.paths;
  std::vector<McRow> rows;
  for (double t : p.times) {
    const auto e = mc_value_cauchy(spec, chain, p.x, t, p.start, f, zero_policy(), opt);
    rows.push_back({p.x, num(t), e});
    if (p.closed_form) {
      const Eigen::MatrixXd prop = k.propagator(t / p.epsilon);
      double exact = 0.0;
      for (int j = 0; j < k.m(); ++j) exact += prop(p.start, j) * f[j](p.x);
      const double z = std::abs(e.mean - exact);
      ctx.check("pure_coupling t=" + tag(t), z <= 3.0 * e.std_error, e.mean, exact,
                "3 s.e. = " + tag(3.0 * e.std_error));
    }
  }
  std::ostringstream os;
  write_mc_csv(os, rows, spec.dim());
  ctx.art.add("mc.csv", os.str());
  json extra = json::object();
  if (p.jump_horizon > 0.0) {
    const auto js = jump_statistics(chain, p.start, p.jump_horizon, p.paths);
    extra["jump_law"] = {{"horizon", p.jump_horizon},     {"no_jump_frequency", js.no_jump_frequency},
                         {"no_jump_se", js.no_jump_se},   {"no_jump_expected", js.no_jump_expected},
                         {"mean_jumps", js.mean_jumps},   {"jumps_se", js.jumps_se},
                         {"jumps_expected", js.jumps_expected}, {"occupation_first", js.occupation_first}};
    ctx.check("jump_law_no_jump", std::abs(js.no_jump_frequency - js.no_jump_expected) <= 3.0 * js.no_jump_se,
              js.no_jump_frequency, js.no_jump_expected, "P(no jump by t) = exp(-c t / eps), 3 s.e.");
    if (std::isfinite(js.jumps_expected))
      ctx.check("jump_law_mean_jumps", std::abs(js.mean_jumps - js.jumps_expected) <= 3.0 * js.jumps_se, js.mean_jumps,
                js.jumps_expected, "Poisson mean c t / eps, 3 s.e.");
  }
  if (!p.effective_P.empty()) {
    std::ostringstream oe;
    oe << (spec.dim() == 1 ? "P" : "P1,P2") << ",h_bar,std_error,policy\n" << std::setprecision(17);
    for (std::size_t n = 0; n < p.effective_P.size(); ++n) {
      const auto& P = p.effective_P[n];
      const auto e = mc_effective_estimate(spec, k, P, p.effective_horizon, p.effective_paths, ctx.config.seed);
      if (!p.effective_expect.empty()) {
        const double want = p.effective_expect[n];
        const double tol = p.effective_rel_tol * std::max(std::abs(want), 1.0);
        ctx.check("mc_effective P=" + label(P, spec.dim()), std::abs(e.h_bar - want) <= tol, e.h_bar, want,
                  "tolerance " + tag(tol) + ", policy " + e.best_policy);
      }
      oe << P[0] << ',';
      if (spec.dim() == 2) oe << P[1] << ',';
      oe << e.h_bar << ',' << e.std_error << ',' << e.best_policy << '\n';
    }
    ctx.art.add("mc_effective.csv", oe.str());
  }
  if (!extra.empty()) ctx.art.add_json("mc.json", extra);
}

void run_dpp(Context& ctx, const DppParams& p) {
  const auto spec = hamiltonian_of(p.hamiltonian);
  const auto k = coupling_of(p.coupling);
  const auto f = data_of(p.initial);
  const TorusGrid grid(spec.dim(), p.N);
  std::vector<GridFunction> data;
  for (const auto& fi : f) data.push_back(sample(grid, fi));
  const EpsSystemProblem prob{spec, k, p.epsilon, grid, data, p.t};
  std::vector<double> times;
  for (int s = 0; s <= p.snapshots; ++s) times.push_back(p.t * s / p.snapshots);
  const PdeFeedback fb(spec, p.epsilon, evolve(prob, times));
  const SwitchingChainSpec chain{k, p.epsilon, ctx.config.seed};
  McOptions opt;
  opt.paths = p.paths;
  std::ostringstream os;
  os << "h_split,one_shot,one_shot_se,nested,nested_se,difference,difference_se,pde_value,tolerance,pass\n"
     << std::setprecision(17);
  for (double h : p.h_split) {
    const auto r = check_dpp(spec, chain, p.x, p.t, h, p.start, f, fb, p.slack_h * grid.spacing(), opt);
    os << h << ',' << r.one_shot.mean << ',' << r.one_shot.std_error << ',' << r.nested.mean << ','
       << r.nested.std_error << ',' << r.difference << ',' << r.difference_se << ',' << r.pde_value << ','
       << r.tolerance << ',' << r.pass << '\n';
    ctx.check("dpp h_split=" + tag(h), r.pass, r.nested.mean - r.one_shot.mean, r.tolerance, "3 s.e. + slack");
  }
  ctx.art.add("dpp.csv", os.str());
}

void dispatch(Context& ctx) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CellParams>) run_cell(ctx, p);
        else if constexpr (std::is_same_v<T, TableParams>) run_table(ctx, p);
        else if constexpr (std::is_same_v<T, EvolveParams>) run_evolve(ctx, p);
        else if constexpr (std::is_same_v<T, RateParams>) run_rate(ctx, p);
        else if constexpr (std::is_same_v<T, FlatParams>) run_flat(ctx, p);
        else if constexpr (std::is_same_v<T, DirichletParams>) run_dirichlet(ctx, p);
        else if constexpr (std::is_same_v<T, McParams>) run_mc(ctx, p);
        else run_dpp(ctx, p);
      },
      ctx.config.params);
}

}  // namespace

json to_json(const Verdict& v) {
  return {{"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"threshold", v.threshold}, {"detail", v.detail}};
}

bool RunResult::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

json version_info() {
  return {{"hjh", kVersion},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"openssl", OPENSSL_VERSION_TEXT},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"threads", max_threads()}};
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  if (options.jobs > 0) set_max_threads(options.jobs);
  RunResult res;
  Context ctx{config, res.artifacts, res.verdicts};
  const auto start = std::chrono::steady_clock::now();
  try {
    dispatch(ctx);
    res.status = res.all_pass() ? kSuccess : kVerdictFailed;
  } catch (const ConfigError& e) {
    res.status = kConfigError;
    res.message = e.what();
    res.verdicts.clear();
    res.artifacts = ArtifactSet{};
    return res;
  } catch (const NonConvergence& e) {
    res.status = kNonConvergence;
    res.message = e.what();
  } catch (const CflViolation& e) {
    res.status = kNonConvergence;
    res.message = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto verdicts = json::array();
  for (const auto& v : res.verdicts) verdicts.push_back(to_json(v));
  res.artifacts.add_json("verdicts.json", verdicts);
  json manifest{{"name", config.name},
                {"kind", to_string(config.kind)},
                {"config", config.source},
                {"versions", version_info()},
                {"runtime_seconds", res.seconds},
                {"status", res.status},
                {"message", res.message},
                {"all_pass", res.status == kSuccess},
                {"artifacts", res.artifacts.digest()}};
  res.artifacts.add_json("manifest.json", manifest);
  if (options.write) res.artifacts.write(options.out_dir);
  return res;
}

}  // namespace hjh
