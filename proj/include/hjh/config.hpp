#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hjh/coupling.hpp"
#include "hjh/effective_table.hpp"
#include "hjh/grid.hpp"
#include "hjh/hamiltonian.hpp"
#include "hjh/numerical_hamiltonian.hpp"

namespace hjh {

enum class ExperimentKind { cell, table, evolve, rate, flat, dirichlet, mc, dpp };

const char* to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& s);
std::vector<std::string> kind_names();

// |Hbar(P) - value| <= tol
struct Expectation {
  Vec P{0.0, 0.0};
  double value = 0.0;
  double tol = 0.0;
};

// v_1 - v_2 at P against the closed form of the explicit a(xi) pair.
struct CorrectorCheck {
  Vec P{1.0, 0.0};
  double tol = 0.05;
};

struct TableSpec {
  int N = 128;
  PLattice lattice;
  std::vector<double> deltas{0.08, 0.04, 0.02};
  double tol = 1e-7;
};

struct CellParams {
  nlohmann::json hamiltonian, coupling;
  int N = 128;
  std::vector<Vec> P;
  std::vector<double> deltas{0.08, 0.04, 0.02};
  double tol = 1e-7;
  FluxKind flux = FluxKind::godunov;
  long max_iterations = 4'000'000;  // per discount level
  std::vector<Expectation> expect;
  std::optional<Expectation> lower_bound;  // value of lower_bound(spec, P)
  bool strict_gap = false;                 // Hbar(P) - err > lower_bound(P)
  std::optional<CorrectorCheck> corrector;
};

struct TableParams {
  nlohmann::json hamiltonian, coupling;
  TableSpec table;
  std::vector<Expectation> expect;
  std::optional<CorrectorCheck> corrector;
  bool max_comparison = false;  // build max_i H_i and compare
  bool collapse = false;        // compare with the single equation of component 0
};

struct CommonLimitCheck {
  double probe_time = 0.1;
  std::vector<double> fit_times{0.025, 0.05, 0.1};
  double tol = 2e-2;
};

struct EvolveParams {
  nlohmann::json hamiltonian, coupling, initial;
  std::vector<double> epsilons;
  int eps_cells = 32;  // N = eps_cells / eps
  double horizon = 0.5;
  std::vector<double> times;
  bool barriers = false;
  double slack_h = 5.0;
  std::optional<CommonLimitCheck> common_limit;
};

struct RateExpect {
  double min_slope = 0.28;
  double layer_spread = 0.5;
  bool monotone = true;
  double sandwich_eps = 0.1;  // NaN when unchecked
  double probe_gap = 2e-2;    // at the smallest eps
};

struct RateParams {
  nlohmann::json hamiltonian, coupling, initial;
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double horizon = 0.5;
  int eps_cells = 32;
  double probe_time = 0.1;
  FluxKind effective_flux = FluxKind::lax_friedrichs;
  TableSpec table;
  RateExpect expect;
  bool layer_only = false;  // verdicts restricted to the initial layer
};

struct FlatParams {
  std::string experiment;
  double eps0 = 0.05;
  int N = 0;        // 0: default per experiment
  double tol = 0.0;  // 0: default per experiment
};

struct DirichletParams {
  nlohmann::json hamiltonian, coupling;
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double lo = 0.0, hi = 1.0;
  int eps_cells = 32;
  std::vector<std::array<double, 2>> boundary;  // per component: left, right
  double tol = 1e-8;
  TableSpec table;
  std::string side = "left";
  double gap_tol = 0.05;
};

struct McParams {
  nlohmann::json hamiltonian, coupling, initial;
  double epsilon = 0.1;
  Vec x{0.0, 0.0};
  std::vector<double> times{0.1};
  int start = 0;
  std::size_t paths = 100'000;
  bool closed_form = false;   // compare with f_bar + (f_i - f_j)/2 e^{-2t/eps}
  double jump_horizon = 0.0;  // > 0: jump-law frequency test over this horizon
  std::vector<Vec> effective_P;
  double effective_horizon = 20.0;
  std::size_t effective_paths = 2000;
  std::vector<double> effective_expect;  // one value per effective_P
  double effective_rel_tol = 0.15;
};

struct DppParams {
  nlohmann::json hamiltonian, coupling, initial;
  double epsilon = 0.1;
  Vec x{0.0, 0.0};
  double t = 0.5;
  std::vector<double> h_split;
  int start = 0;
  std::size_t paths = 10'000;
  int N = 256;
  int snapshots = 50;
  double slack_h = 5.0;
};

using ExperimentParams =
    std::variant<CellParams, TableParams, EvolveParams, RateParams, FlatParams, DirichletParams, McParams, DppParams>;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::cell;
  std::string name = "custom";
  std::uint64_t seed = 0;
  ExperimentParams params;
  nlohmann::json source;  // the validated input, echoed into the manifest
};

// Full schema check; every object rejects unknown keys and every Hamiltonian, coupling and datum is built once.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

HamiltonianSpec hamiltonian_of(const nlohmann::json& j);
// Rows of K; absent means the symmetric two-state chain.
CouplingMatrix coupling_of(const nlohmann::json& j);
// {"name": "sine"|"cosine", "amplitude", "axis", "shift"} | {"name": "constant", "value"} | "zero"
ScalarField datum_of(const nlohmann::json& j);
std::vector<ScalarField> data_of(const nlohmann::json& list);
std::vector<std::string> datum_names();

}  // namespace hjh
