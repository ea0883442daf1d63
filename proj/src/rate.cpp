#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hjh/effective.hpp"
#include "hjh/errors.hpp"

namespace hjh {

namespace {

std::vector<double> sample_times(double eps, double horizon, const RateOptions& o, double layer_end) {
  std::vector<double> t;
  for (int k = 0; k <= o.uniform_samples; ++k) t.push_back(horizon * k / o.uniform_samples);
  for (int k = 1; k <= o.layer_samples; ++k) t.push_back(std::min(horizon, layer_end * k / o.layer_samples));
  if (o.probe_time > 0.0 && o.probe_time <= horizon) t.push_back(o.probe_time);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double x : t)
    if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, eps)) out.push_back(x);
  return out;
}

int grid_points(double eps, int eps_cells) {
  const double periods = 1.0 / eps;
  const double r = std::round(periods);
  if (std::abs(periods - r) > 1e-9 * periods || r < 1.0)
    throw ConfigError("1/epsilon must be an integer so the fast variable is periodic on the torus");
  return static_cast<int>(r) * eps_cells;
}

}  // namespace

RateReport rate_harness(const HamiltonianSpec& spec, const CouplingMatrix& k, const std::vector<ScalarField>& f,
                        const std::vector<double>& eps_list, double horizon, const EffectiveTable& table,
                        const RateOptions& options) {
  if (eps_list.empty()) throw ConfigError("epsilon list is empty");
  for (std::size_t s = 1; s < eps_list.size(); ++s)
    if (!(eps_list[s] < eps_list[s - 1])) throw ConfigError("epsilon list must be decreasing");
  if (static_cast<int>(f.size()) != spec.m()) throw ConfigError("one initial datum per component is required");
  RateReport rep;
  rep.doubly_stochastic = k.doubly_stochastic();
  for (double eps : eps_list) {
    RateRow row;
    row.epsilon = eps;
    const auto start = std::chrono::steady_clock::now();
    try {
      const int n = grid_points(eps, options.eps_cells);
      row.grid_n = n;
      const TorusGrid grid(spec.dim(), n);
      std::vector<GridFunction> data;
      for (const auto& fi : f) data.push_back(sample(grid, fi));
      EpsSystemProblem prob{spec, k, eps, grid, data, horizon};
      const double layer_end = std::min(horizon, eps * std::abs(std::log(eps)));
      const auto times = sample_times(eps, horizon, options, layer_end);
      const CoupledEvolution solver(prob, options.evolution);
      const auto run = solver.evolve(times);
      EffectiveProblem eff{table, grid, prob.averaged_initial(), horizon};
      const auto urun = solve_effective(eff, times, options.effective);
      const auto matched = matched_solutions(urun.snapshots, data, k, eps);
      row.e_total = row.e_layer = row.e_bulk = 0.0;
      for (std::size_t s = 0; s < times.size(); ++s) {
        double e = 0.0;
        for (int i = 0; i < spec.m(); ++i)
          for (std::size_t q = 0; q < grid.size(); ++q)
            e = std::max(e, std::abs(run[s].components[i][q] - matched.matched[s].components[i][q]));
        row.e_total = std::max(row.e_total, e);
        if (times[s] <= layer_end * (1.0 + 1e-12)) row.e_layer = std::max(row.e_layer, e);
        if (times[s] >= layer_end * (1.0 - 1e-12)) row.e_bulk = std::max(row.e_bulk, e);
        if (std::abs(times[s] - options.probe_time) < 1e-12) {
          double pe = 0.0, gap = 0.0;
          const auto& u = urun.snapshots[s].components[0];
          for (std::size_t q = 0; q < grid.size(); ++q) {
            for (int i = 0; i < spec.m(); ++i) {
              pe = std::max(pe, std::abs(run[s].components[i][q] - u[q]));
              for (int j = i + 1; j < spec.m(); ++j)
                gap = std::max(gap, std::abs(run[s].components[i][q] - run[s].components[j][q]));
            }
          }
          row.probe_error = pe;
          row.probe_gap = gap;
        }
      }
      row.layer_constant = row.e_layer / (eps * std::abs(std::log(eps)));
      const auto barriers = build_barriers(prob, times);
      row.sandwich = check_sandwich(run, barriers, 5.0 * grid.spacing());
      row.ok = true;
    } catch (const std::exception& ex) {
      row.ok = false;
      row.failure = ex.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.rows.push_back(row);
  }
  std::vector<double> lx, ly, cs;
  for (const auto& r : rep.rows) {
    if (!r.ok || !(r.e_total > 0.0)) continue;
    lx.push_back(std::log(r.epsilon));
    ly.push_back(std::log(r.e_total));
    cs.push_back(r.layer_constant);
  }
  const auto fit = fit_line(lx, ly);
  rep.fitted_slope = fit[0];
  rep.fitted_intercept = fit[1];
  for (std::size_t s = 0; s + 1 < rep.rows.size(); ++s)
    rep.ratios.push_back(rep.rows[s].e_total / rep.rows[s + 1].e_total);
  if (!cs.empty()) {
    double mean = 0.0;
    for (double c : cs) mean += c;
    mean /= cs.size();
    double spread = 0.0;
    for (double c : cs) spread = std::max(spread, std::abs(c / mean - 1.0));
    rep.layer_constant_mean = mean;
    rep.layer_constant_spread = spread;
  }
  return rep;
}

void write_rate_csv(std::ostream& os, const RateReport& report) {
  os << "epsilon,grid_N,E_total,E_layer,E_bulk,fitted_slope\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& r : report.rows) {
    line.str("");
    line << r.epsilon << ',' << r.grid_n << ',' << r.e_total << ',' << r.e_layer << ',' << r.e_bulk << ','
         << report.fitted_slope << '\n';
    os << line.str();
  }
}

}  // namespace hjh
