#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hjh/cell.hpp"

namespace hjh {

// Which potential construction an experiment uses; selects its hypothesis audit.
enum class FlatKind {
  nested_wells,    // V_i >= 0, zero sets inside W_1 inside W_2 inside the open cell
  stripe,          // {V_1 = 0} = {V_2 = 0} = {xi_2 = 1/2}
  interval_wells,  // V_1 in [-eps0, 0] and V_2 in [0, 2] with the 1/16-grid level sets
  single_well,     // V_1 = 0, V_2 >= 0 with {V_2 = 0} = {1/2}
  contained_well,  // V_1 >= 0, V_2 >= 0, {V_1 = 0} meets {V_2 = 0}, {V_2 = 0} inside a window W of the open cell
  product_wells,   // V_1 = V^1(xi_1), V_2 = V^2(xi_2), each with a single zero
};

enum class Prediction { flat_zero, stripe_square, product_flat };

const char* to_string(FlatKind k);
const char* to_string(Prediction p);

struct Interval {
  double lo, hi;
};

struct FlatExperiment {
  std::string name;
  FlatKind kind;
  Prediction prediction;
  HamiltonianSpec spec;
  std::vector<Vec> samples;
  double tolerance = 0.03;

  // Construction parameters the audits need.
  double eps0 = 0.0;                           // interval_wells
  std::vector<Interval> zero_sets{};           // 1D: {V_i = 0} per component
  Interval w1{0.0, 0.0}, w2{0.0, 0.0};         // nested_wells windows
  Vec well_center{0.5, 0.5};                   // contained_well: centre of W
  double window_radius = 0.0;                  // contained_well: radius of W
};

// Theorem constructions with the parameters used throughout the tests and presets.
FlatExperiment interval_wells_experiment(double eps0 = 0.05);
FlatExperiment nested_wells_experiment();
FlatExperiment stripe_experiment(double b1 = 0.5, double b2 = -0.3);
FlatExperiment single_well_experiment();
FlatExperiment contained_well_experiment(bool arbitrary_first = false);
FlatExperiment product_wells_experiment();

// interval_wells, nested_wells, stripe, single_well, contained_well, contained_well_arbitrary, product_wells
std::vector<std::string> flat_experiment_names();
FlatExperiment flat_experiment(const std::string& name, double eps0 = 0.05);

struct HypothesisCheck {
  std::string name;
  bool ok = false;
  double value = 0.0;
};

// Numerical check of the construction's hypotheses on a fine audit grid.
std::vector<HypothesisCheck> audit_hypotheses(const FlatExperiment& exp);

struct FlatSolverConfig {
  CellOptions cell;
  std::vector<double> deltas{0.08, 0.04, 0.02};
  double tol = 1e-7;
};

struct FlatPoint {
  Vec P{0.0, 0.0};
  double h_bar = 0.0;
  double err_bar = 0.0;
  double lower_cert = 0.0;
  double upper_cert = 0.0;
  double predicted = 0.0;
  bool pass = false;
};

struct SubsolutionCheck {
  double gamma = 0.0;  // sqrt(eps0) / sup|P + D phi| per unit |P| outside W_1
  std::vector<Vec> P;
  std::vector<double> certificate;
  bool ok = false;
};

struct FlatVerdict {
  std::string name;
  Prediction prediction;
  std::vector<HypothesisCheck> hypotheses;
  std::vector<FlatPoint> points;
  double gamma_scan = 0.0;
  bool has_subsolution = false;
  SubsolutionCheck subsolution;
  bool pass = false;
};

// Grid and tolerance matched to the experiment's dimension (1D: N=256; 2D: N=64, stripe N=128).
FlatSolverConfig default_flat_config(const FlatExperiment& exp);

// Throws ConfigError without solving when a hypothesis fails.
FlatVerdict run_flat_experiment(const FlatExperiment& exp, const FlatSolverConfig& config = {});

// phi = -P (xi - c) psi(xi) with psi = 1 on W_1 and 0 off W_2; the same function for both components.
GridFunction nested_wells_subsolution(const FlatExperiment& exp, double P, const TorusGrid& grid);
SubsolutionCheck check_nested_wells_subsolution(const FlatExperiment& exp, const TorusGrid& grid,
                                               const std::vector<double>& fractions = {0.0, 0.25, 0.5, 0.75, 0.95});

nlohmann::json to_json(const FlatVerdict& v);

}  // namespace hjh
