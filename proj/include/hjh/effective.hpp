#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hjh/coupling.hpp"
#include "hjh/effective_table.hpp"
#include "hjh/evolution.hpp"

namespace hjh {

// u_t + Hbar(Du) = 0 with Hbar read from a table.
struct EffectiveProblem {
  EffectiveTable table;
  TorusGrid grid;
  GridFunction initial;
  double horizon;
};

struct EffectiveOptions {
  FluxKind flux = FluxKind::lax_friedrichs;
};

struct EffectiveRun {
  std::vector<StateField> snapshots;
  std::size_t clamped_queries = 0;
  double theta = 0.0;
  double dt = 0.0;
  std::vector<std::string> warnings;
};

EffectiveRun solve_effective(const EffectiveProblem& problem, const std::vector<double>& sample_times,
                             const EffectiveOptions& options = {});

// f_bar +/- (f_1 - f_2)/2 e^{-2 t_fast}
std::array<GridFunction, 2> inner_solution(const GridFunction& f1, const GridFunction& f2, double t_fast);

struct MatchedTrajectory {
  std::vector<StateField> matched;  // m_i at each sample time
  std::vector<StateField> effective;
  double epsilon = 0.0;
};

// m_i = u + [exp((t/eps)(K - I)) (f - f_bar j)]_i, which for two symmetric states is
// u + (f_i - f_j)/2 e^{-2t/eps}.
MatchedTrajectory matched_solutions(const std::vector<StateField>& u_run, const std::vector<GridFunction>& f,
                                    const CouplingMatrix& k, double epsilon);

struct RateOptions {
  int eps_cells = 32;
  int uniform_samples = 60;
  int layer_samples = 40;
  double probe_time = 0.1;
  EvolutionOptions evolution;
  EffectiveOptions effective;
};

struct RateRow {
  double epsilon = 0.0;
  int grid_n = 0;
  double e_total = NAN;
  double e_layer = NAN;
  double e_bulk = NAN;
  double layer_constant = NAN;  // e_layer / (eps |log eps|)
  double probe_error = NAN;     // max_i,x |u_i - u| at probe_time
  double probe_gap = NAN;       // max_x |u_1 - u_2| at probe_time
  SandwichReport sandwich;
  double seconds = 0.0;
  bool ok = false;
  std::string failure;
};

struct RateReport {
  std::vector<RateRow> rows;
  double fitted_slope = NAN;
  double fitted_intercept = NAN;
  double layer_constant_mean = NAN;
  double layer_constant_spread = NAN;  // max |C/mean - 1|
  std::vector<double> ratios;          // E(eps_k) / E(eps_{k+1})
  bool doubly_stochastic = true;
};

// One eps per row; each row solves the eps-system, the effective problem on the same grid, and compares.
RateReport rate_harness(const HamiltonianSpec& spec, const CouplingMatrix& k, const std::vector<ScalarField>& f,
                        const std::vector<double>& eps_list, double horizon, const EffectiveTable& table,
                        const RateOptions& options = {});

void write_rate_csv(std::ostream& os, const RateReport& report);

// Least-squares slope and intercept of y on x.
std::array<double, 2> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hjh
