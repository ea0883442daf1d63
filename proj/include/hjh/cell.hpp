#pragma once

#include <vector>

#include "hjh/coupling.hpp"
#include "hjh/numerical_hamiltonian.hpp"

namespace hjh {

// jacobi: explicit pseudo-time step on the whole grid; gauss_seidel: the same local step applied in place,
// alternating the sweep direction each pass.
enum class CellSweep { jacobi, gauss_seidel };

struct CellOptions {
  int points_per_axis = 128;
  FluxKind flux = FluxKind::godunov;
  double r_grad = 4.0;
  double h_factor = 1.0;  // require h <= delta * h_factor
  double cfl = 0.9;
  CellSweep sweep = CellSweep::gauss_seidel;
  int sweeps_per_check = 8;  // gauss_seidel passes between residual evaluations
  bool adaptive_bound = true;  // Godunov only: size the pseudo-time step from the gradients seen so far
  long max_iterations = 4'000'000;
  int history_stride = 1000;
};

// Discounted cell system H_i(xi, P + Dv_i) + (1 + delta) v_i - sum_j c_ij v_j = 0.
struct CellSolution {
  Vec P{0.0, 0.0};
  double delta = 0.0;
  TorusGrid grid{1, 4};
  std::vector<GridFunction> values;
  double residual = 0.0;
  double h_bar_estimate = 0.0;
  // -max(delta v) <= Hbar <= -min(delta v) for the discrete system.
  double lower_spread = 0.0;
  double upper_spread = 0.0;
  // max |delta v + h_bar_estimate| / delta
  double spread_constant = 0.0;
  long iterations = 0;
  double max_gradient = 0.0;
};

CellSolution solve_cell_discounted(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P, double delta,
                                   double tol, const CellOptions& options = {},
                                   const std::vector<GridFunction>* warm_start = nullptr);

struct EffectiveEstimate {
  double h_bar = 0.0;
  double error_bar = 0.0;
  std::vector<double> deltas;
  std::vector<double> estimates;
  std::vector<double> spreads;  // max - min of delta v, per delta
  CellSolution finest;
};

EffectiveEstimate effective_at(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P,
                               const std::vector<double>& deltas, double tol, const CellOptions& options = {});

// v_i minus the mean over all components and gridpoints jointly.
std::vector<GridFunction> correctors(const CellSolution& solution);

enum class CertificateStencil { central, monotone };

// max over i, xi of H_i(xi, P + D phi_i) + phi_i - sum_j c_ij phi_j.
double upper_certificate(const HamiltonianSpec& spec, const CouplingMatrix& k, const Vec& P, const TorusGrid& grid,
                         const std::vector<GridFunction>& test_pair,
                         CertificateStencil stencil = CertificateStencil::central);

// max of min_{i,xi} H_i(xi, P) and, for two |p|^2 - V_i components, -min(V_1 + V_2)/2.
double lower_bound(const HamiltonianSpec& spec, const Vec& P);
double potential_sum_bound(const HamiltonianSpec& spec);  // -min(V_1 + V_2)/2, NaN when not applicable

}  // namespace hjh
